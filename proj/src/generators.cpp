#include "lgs/generators.hpp"

#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "lgs/random.hpp"

namespace lgs {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

}  // namespace

GeneratedGraph generate_sbm_lattice(const SbmLatticeParams& p) {
    if (p.rows < 1 || p.cols < 1 || p.cluster_size < 1)
        throw std::invalid_argument("rows, cols and cluster_size must be >= 1");
    check_probability(p.p_in, "p_in");
    check_probability(p.p_adj, "p_adj");
    check_probability(p.p_far, "p_far");

    const auto clusters = static_cast<std::size_t>(p.rows) * static_cast<std::size_t>(p.cols);
    const auto size = static_cast<std::size_t>(p.cluster_size);
    const auto n = clusters * size;

    std::vector<std::uint32_t> labels(n);
    for (std::size_t v = 0; v < n; ++v)
        labels[v] = static_cast<std::uint32_t>(v / size);

    auto pair_probability = [&](std::size_t a, std::size_t b) {
        if (a == b)
            return p.p_in;
        const auto ra = static_cast<int>(a) / p.cols, ca = static_cast<int>(a) % p.cols;
        const auto rb = static_cast<int>(b) / p.cols, cb = static_cast<int>(b) % p.cols;
        return std::abs(ra - rb) + std::abs(ca - cb) == 1 ? p.p_adj : p.p_far;
    };

    Rng rng(p.seed);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.uniform() < pair_probability(labels[i], labels[j]))
                edges.push_back({static_cast<vertex_t>(i), static_cast<vertex_t>(j), 1.0});
        }
    }
    return {Graph(n, std::move(edges)), std::move(labels)};
}

Graph watts_strogatz_ring(const WattsStrogatzParams& p) {
    if (p.n < 2)
        throw std::invalid_argument("n must be >= 2");
    if (p.ring_degree < 2 || p.ring_degree % 2 != 0 || p.ring_degree >= p.n)
        throw std::invalid_argument("ring_degree must be even, >= 2 and < n");
    check_probability(p.rewire_p, "rewire_p");

    const auto n = static_cast<std::size_t>(p.n);
    const auto half = static_cast<std::size_t>(p.ring_degree / 2);
    std::vector<std::unordered_set<vertex_t>> adj(n);
    auto link = [&](std::size_t a, std::size_t b) {
        adj[a].insert(static_cast<vertex_t>(b));
        adj[b].insert(static_cast<vertex_t>(a));
    };
    for (std::size_t j = 1; j <= half; ++j) {
        for (std::size_t u = 0; u < n; ++u)
            link(u, (u + j) % n);
    }

    // Each ring edge (u, u+j) is visited once, in order of offset then vertex.
    Rng rng(p.seed);
    for (std::size_t j = 1; j <= half; ++j) {
        for (std::size_t u = 0; u < n; ++u) {
            const auto v = (u + j) % n;
            if (!(rng.uniform() < p.rewire_p))
                continue;
            if (adj[u].size() >= n - 1)
                continue;  // u already adjacent to everything
            std::size_t w;
            do {
                w = rng.below(n);
            } while (w == u || adj[u].contains(static_cast<vertex_t>(w)));
            adj[u].erase(static_cast<vertex_t>(v));
            adj[v].erase(static_cast<vertex_t>(u));
            link(u, w);
        }
    }

    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n; ++u) {
        for (auto v : adj[u]) {
            if (u < v)
                edges.push_back({static_cast<vertex_t>(u), v, 1.0});
        }
    }
    return Graph(n, std::move(edges));
}

Graph generate_watts_strogatz(const WattsStrogatzParams& p) {
    return largest_component(watts_strogatz_ring(p));
}

GeneratedGraph generate(const GeneratorParams& p) {
    if (const auto* sbm = std::get_if<SbmLatticeParams>(&p))
        return generate_sbm_lattice(*sbm);
    return {generate_watts_strogatz(std::get<WattsStrogatzParams>(p)), {}};
}

std::string describe(const GeneratorParams& p) {
    std::ostringstream out;
    if (const auto* sbm = std::get_if<SbmLatticeParams>(&p)) {
        out << "sbm-lattice(" << sbm->rows << "x" << sbm->cols << ", size=" << sbm->cluster_size
            << ", p_in=" << sbm->p_in << ", p_adj=" << sbm->p_adj << ", p_far=" << sbm->p_far
            << ", seed=" << sbm->seed << ")";
    } else {
        const auto& ws = std::get<WattsStrogatzParams>(p);
        out << "watts-strogatz(n=" << ws.n << ", ring=" << ws.ring_degree << ", p=" << ws.rewire_p
            << ", seed=" << ws.seed << ")";
    }
    return out.str();
}

}  // namespace lgs
