#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgs/graph.hpp"
#include "lgs/optimizer.hpp"

namespace lgs {

struct ClusterAssignment {
    enum class Source { given_labels, modularity };

    std::vector<std::uint32_t> cluster;  // per vertex, ids in [0, count)
    std::size_t count = 0;
    Source source = Source::given_labels;

    // Relabels arbitrary ids to contiguous ones in order of first appearance.
    static ClusterAssignment from_labels(const std::vector<std::uint32_t>& labels,
                                         Source source = Source::given_labels);
};

// m x m cluster dissimilarity; the diagonal is unused.
struct ClusterDeltaMatrix {
    Eigen::MatrixXd values;
    std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

struct MetricReport {
    double ne = 0.0;
    double stress = 0.0;
    std::optional<double> cd;
    int radius = 2;
    double scale = 1.0;  // optimal stress scale applied to the layout
    std::optional<double> cd_scale;
    std::optional<ClusterAssignment> clusters;
    std::vector<std::string> warnings;
};

// 1 - mean Jaccard similarity between {j : d_ij <= r} and the equally sized set of
// nearest embedded vertices (ties by index).
double neighborhood_error(const DistanceMatrix& d, const Coordinates& x, int r);

// argmin over sigma of sum_{i<j} ((d_ij - sigma e_ij) / d_ij)^2. Throws std::domain_error when
// every point coincides.
double optimal_scale(const DistanceMatrix& d, const Coordinates& x);
double optimal_scale(const Eigen::MatrixXd& target, const Coordinates& x);

// Normalized stress after optimal uniform scaling, over unordered pairs.
double stress_metric(const DistanceMatrix& d, const Coordinates& x);

enum class ModularityMethod {
    // Local moves in vertex order, then communities collapse into vertices and the moves
    // repeat. Ties keep the current community, then the smallest community id.
    multilevel,
    // Clauset-Newman-Moore: merge the pair with the largest positive gain; ties go to the
    // lexicographically smallest (a, b). Tends to fuse planted clusters early.
    cnm,
};

// Greedy modularity maximization. Both methods are deterministic; the seed is accepted for
// interface stability only.
ClusterAssignment modularity_clusters(const Graph& g, std::uint64_t seed = 0,
                                      ModularityMethod method = ModularityMethod::multilevel);

double modularity(const Graph& g, const std::vector<std::uint32_t>& cluster);

// delta_ij = 1 - (#edges between C_i and C_j) / |E|, zero diagonal.
ClusterDeltaMatrix cluster_delta(const Graph& g, const ClusterAssignment& ca);

struct ClusterDistance {
    double value = 0.0;
    double scale = 1.0;
    std::size_t skipped_pairs = 0;  // pairs with delta <= 0
};

// Cluster-level normalized stress between delta and the scaled distances of cluster centers.
// Throws std::invalid_argument with fewer than two clusters.
ClusterDistance cluster_distance_detailed(const ClusterDeltaMatrix& delta, const Coordinates& x,
                                          const ClusterAssignment& ca);
double cluster_distance(const ClusterDeltaMatrix& delta, const Coordinates& x, const ClusterAssignment& ca);

Eigen::MatrixX2d cluster_centers(const Coordinates& x, const ClusterAssignment& ca);

struct EvaluateOptions {
    int radius = 2;
    std::optional<ClusterAssignment> clusters;  // modularity clustering when absent
    std::uint64_t seed = 0;
};

MetricReport evaluate(const Graph& g, const DistanceMatrix& d, const Coordinates& x,
                      const EvaluateOptions& options = {});

}  // namespace lgs
