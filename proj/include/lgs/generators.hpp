#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lgs/graph.hpp"

namespace lgs {

// Stochastic block model whose clusters sit on a rows x cols lattice.
struct SbmLatticeParams {
    int rows = 3;
    int cols = 3;
    int cluster_size = 100;
    double p_in = 0.2;
    double p_adj = 0.01;
    double p_far = 0.001;
    std::uint64_t seed = 0;
};

struct WattsStrogatzParams {
    int n = 1000;
    int ring_degree = 0;  // even, no default on purpose
    double rewire_p = 0.0;
    std::uint64_t seed = 0;
};

using GeneratorParams = std::variant<SbmLatticeParams, WattsStrogatzParams>;

struct GeneratedGraph {
    Graph graph;
    std::vector<std::uint32_t> labels;  // ground-truth clusters; empty when the model has none
};

GeneratedGraph generate_sbm_lattice(const SbmLatticeParams& p);

// Ring lattice plus rewiring, before component extraction.
Graph watts_strogatz_ring(const WattsStrogatzParams& p);
// Largest component of watts_strogatz_ring.
Graph generate_watts_strogatz(const WattsStrogatzParams& p);

GeneratedGraph generate(const GeneratorParams& p);

std::string describe(const GeneratorParams& p);

}  // namespace lgs
