#include "lgs/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace lgs {

ClusterAssignment ClusterAssignment::from_labels(const std::vector<std::uint32_t>& labels, Source source) {
    ClusterAssignment out;
    out.source = source;
    out.cluster.resize(labels.size());
    std::unordered_map<std::uint32_t, std::uint32_t> ids;
    for (std::size_t v = 0; v < labels.size(); ++v) {
        auto [it, inserted] = ids.emplace(labels[v], static_cast<std::uint32_t>(ids.size()));
        out.cluster[v] = it->second;
    }
    out.count = ids.size();
    return out;
}

double neighborhood_error(const DistanceMatrix& d, const Coordinates& x, int r) {
    if (r < 1)
        throw std::invalid_argument("radius r must be >= 1");
    const auto n = d.size();
    if (static_cast<std::size_t>(x.rows()) != n)
        throw std::invalid_argument("embedding and distance matrix disagree on vertex count");
    if (n < 2)
        return 0.0;

    std::vector<std::uint32_t> order(n - 1);
    std::vector<double> sq(n);
    std::vector<std::uint8_t> in_graph(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < n; ++j) {
            in_graph[j] = j != i && d(i, j) <= static_cast<double>(r);
            m += in_graph[j];
            const double dx = x(static_cast<Eigen::Index>(i), 0) - x(static_cast<Eigen::Index>(j), 0);
            const double dy = x(static_cast<Eigen::Index>(i), 1) - x(static_cast<Eigen::Index>(j), 1);
            sq[j] = dx * dx + dy * dy;
        }
        if (m == 0) {
            total += 1.0;
            continue;
        }
        std::size_t pos = 0;
        for (std::uint32_t j = 0; j < n; ++j)
            if (j != i)
                order[pos++] = j;
        const auto mid = order.begin() + static_cast<std::ptrdiff_t>(m);
        std::nth_element(order.begin(), mid - 1, order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return sq[a] != sq[b] ? sq[a] < sq[b] : a < b;
        });
        std::size_t common = 0;
        for (auto it = order.begin(); it != mid; ++it)
            common += in_graph[*it];
        total += static_cast<double>(common) / static_cast<double>(2 * m - common);
    }
    return 1.0 - total / static_cast<double>(n);
}

double optimal_scale(const Eigen::MatrixXd& target, const Coordinates& x) {
    const auto n = target.rows();
    if (x.rows() != n)
        throw std::invalid_argument("embedding and distance matrix disagree on vertex count");
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double t = target(i, j);
            if (!(t > 0.0))
                continue;
            const double e = (x.row(i) - x.row(j)).norm();
            num += e / t;
            den += e * e / (t * t);
        }
    }
    if (!(den > 0.0))
        throw std::domain_error("cannot scale a layout whose points all coincide");
    return num / den;
}

double optimal_scale(const DistanceMatrix& d, const Coordinates& x) { return optimal_scale(d.values, x); }

double stress_metric(const DistanceMatrix& d, const Coordinates& x) {
    const double sigma = optimal_scale(d, x);
    const auto n = d.values.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double t = d.values(i, j);
            if (!(t > 0.0))
                throw std::domain_error("stress requires positive off-diagonal distances");
            const double r = (t - sigma * (x.row(i) - x.row(j)).norm()) / t;
            total += r * r;
        }
    }
    return total;
}

double modularity(const Graph& g, const std::vector<std::uint32_t>& cluster) {
    const double m = static_cast<double>(g.edge_count());
    if (m == 0.0)
        return 0.0;
    const auto k = cluster.empty() ? 0 : *std::max_element(cluster.begin(), cluster.end()) + 1;
    std::vector<double> inside(k, 0.0), degree(k, 0.0);
    for (const auto& e : g.edges()) {
        if (cluster[e.u] == cluster[e.v])
            inside[cluster[e.u]] += 1.0;
        degree[cluster[e.u]] += 1.0;
        degree[cluster[e.v]] += 1.0;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < k; ++c)
        q += inside[c] / m - (degree[c] / (2.0 * m)) * (degree[c] / (2.0 * m));
    return q;
}

namespace {

// Community graph with integer edge multiplicities; a self entry holds twice the internal
// edge count so that row sums are degrees.
using CommunityGraph = std::vector<std::map<std::uint32_t, std::int64_t>>;

// Moves single vertices of w to the neighboring community with the largest gain until none
// improves. Returns whether anything moved.
bool local_moves(const CommunityGraph& w, std::int64_t m2, std::vector<std::uint32_t>& community) {
    const auto count = static_cast<std::uint32_t>(w.size());
    std::vector<std::int64_t> degree(count, 0), total(count, 0);
    for (std::uint32_t v = 0; v < count; ++v) {
        for (const auto& [u, x] : w[v])
            degree[v] += x;
        total[community[v]] += degree[v];
    }
    // Moving v into community c gains (links_c * 2m - total_c * deg_v) / (2m^2) relative
    // to leaving it isolated; the numerators are exact integers.
    bool changed = false, moved = true;
    std::map<std::uint32_t, std::int64_t> links;
    while (moved) {
        moved = false;
        for (std::uint32_t v = 0; v < count; ++v) {
            links.clear();
            for (const auto& [u, x] : w[v])
                if (u != v)
                    links[community[u]] += x;
            const auto own = community[v];
            total[own] -= degree[v];
            auto gain = [&](std::uint32_t c, std::int64_t l) { return l * m2 - total[c] * degree[v]; };
            auto best_c = own;
            const auto it = links.find(own);
            auto best = gain(own, it == links.end() ? 0 : it->second);
            for (const auto& [c, l] : links) {
                const auto value = gain(c, l);
                if (value > best) {
                    best = value;
                    best_c = c;
                }
            }
            total[best_c] += degree[v];
            if (best_c != own) {
                community[v] = best_c;
                moved = changed = true;
            }
        }
    }
    return changed;
}

std::vector<std::uint32_t> multilevel_communities(const Graph& g) {
    const auto n = g.vertex_count();
    CommunityGraph base(n);
    std::int64_t m2 = 0;
    for (const auto& e : g.edges()) {
        base[e.u][e.v] += 1;
        base[e.v][e.u] += 1;
        m2 += 2;
    }
    std::vector<std::uint32_t> member(n);
    std::iota(member.begin(), member.end(), 0u);
    if (m2 == 0)
        return member;

    CommunityGraph w = base;
    while (true) {
        const auto count = static_cast<std::uint32_t>(w.size());
        std::vector<std::uint32_t> community(count);
        std::iota(community.begin(), community.end(), 0u);
        if (!local_moves(w, m2, community))
            break;
        std::vector<std::uint32_t> id(count, UINT32_MAX);
        std::uint32_t next = 0;
        for (std::uint32_t v = 0; v < count; ++v)
            if (id[community[v]] == UINT32_MAX)
                id[community[v]] = next++;
        CommunityGraph collapsed(next);
        for (std::uint32_t v = 0; v < count; ++v)
            for (const auto& [u, x] : w[v])
                collapsed[id[community[v]]][id[community[u]]] += x;
        for (auto& m : member)
            m = id[community[m]];
        w = std::move(collapsed);
    }
    // aggregation can strand single vertices; one last pass on the original graph
    local_moves(base, m2, member);
    return member;
}

std::vector<std::uint32_t> cnm_communities(const Graph& g) {
    const auto n = g.vertex_count();
    const auto m2 = 2 * static_cast<std::int64_t>(g.edge_count());

    // links[a][b]: number of edges between communities a and b
    std::vector<std::map<std::uint32_t, std::int64_t>> links(n);
    std::vector<std::int64_t> degree(n, 0);
    for (const auto& e : g.edges()) {
        links[e.u][e.v] += 1;
        links[e.v][e.u] += 1;
        ++degree[e.u];
        ++degree[e.v];
    }
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    std::vector<std::uint8_t> alive(n, 1);

    // Gain of merging a and b is (2m * L_ab - D_a * D_b) / (2 m^2); compare integer numerators.
    while (true) {
        std::int64_t best = 0;
        std::uint32_t best_a = 0, best_b = 0;
        bool found = false;
        for (std::uint32_t a = 0; a < n; ++a) {
            if (!alive[a])
                continue;
            for (auto it = links[a].upper_bound(a); it != links[a].end(); ++it) {
                const auto gain = m2 * it->second - degree[a] * degree[it->first];
                if (gain > best) {
                    best = gain;
                    best_a = a;
                    best_b = it->first;
                    found = true;
                }
            }
        }
        if (!found)
            break;

        const auto a = best_a, b = best_b;
        for (const auto& [c, count] : links[b]) {
            if (c == a)
                continue;
            links[a][c] += count;
            links[c][a] += count;
            links[c].erase(b);
        }
        links[a].erase(b);
        links[b].clear();
        degree[a] += degree[b];
        degree[b] = 0;
        alive[b] = 0;
        parent[b] = a;
    }

    std::vector<std::uint32_t> root(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        auto r = v;
        while (parent[r] != r)
            r = parent[r];
        root[v] = r;
    }
    return root;
}

}  // namespace

ClusterAssignment modularity_clusters(const Graph& g, std::uint64_t /*seed*/, ModularityMethod method) {
    auto labels = method == ModularityMethod::cnm ? cnm_communities(g) : multilevel_communities(g);
    return ClusterAssignment::from_labels(labels, ClusterAssignment::Source::modularity);
}

ClusterDeltaMatrix cluster_delta(const Graph& g, const ClusterAssignment& ca) {
    if (ca.cluster.size() != g.vertex_count())
        throw std::invalid_argument("cluster assignment and graph disagree on vertex count");
    const auto m = static_cast<Eigen::Index>(ca.count);
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(m, m);
    for (const auto& e : g.edges()) {
        const auto a = ca.cluster[e.u], b = ca.cluster[e.v];
        if (a != b) {
            counts(a, b) += 1.0;
            counts(b, a) += 1.0;
        }
    }
    const double total = static_cast<double>(g.edge_count());
    Eigen::MatrixXd delta = Eigen::MatrixXd::Ones(m, m);
    if (total > 0.0)
        delta -= counts / total;
    delta.diagonal().setZero();
    return {std::move(delta)};
}

Eigen::MatrixX2d cluster_centers(const Coordinates& x, const ClusterAssignment& ca) {
    if (ca.cluster.size() != static_cast<std::size_t>(x.rows()))
        throw std::invalid_argument("cluster assignment and embedding disagree on vertex count");
    Eigen::MatrixX2d centers = Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(ca.count), 2);
    std::vector<double> sizes(ca.count, 0.0);
    for (Eigen::Index v = 0; v < x.rows(); ++v) {
        centers.row(ca.cluster[v]) += x.row(v);
        sizes[ca.cluster[v]] += 1.0;
    }
    for (std::size_t c = 0; c < ca.count; ++c) {
        if (sizes[c] == 0.0)
            throw std::invalid_argument("cluster " + std::to_string(c) + " is empty");
        centers.row(static_cast<Eigen::Index>(c)) /= sizes[c];
    }
    return centers;
}

ClusterDistance cluster_distance_detailed(const ClusterDeltaMatrix& delta, const Coordinates& x,
                                          const ClusterAssignment& ca) {
    if (ca.count < 2)
        throw std::invalid_argument("cluster distance needs at least two clusters");
    if (delta.size() != ca.count)
        throw std::invalid_argument("delta matrix and cluster assignment disagree on cluster count");
    const auto centers = cluster_centers(x, ca);
    const auto m = static_cast<Eigen::Index>(ca.count);

    ClusterDistance out;
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double t = delta.values(i, j);
            if (!(t > 0.0)) {
                ++out.skipped_pairs;
                continue;
            }
            const double e = (centers.row(i) - centers.row(j)).norm();
            num += e / t;
            den += e * e / (t * t);
        }
    }
    // coincident centers: the best uniform scale is zero
    out.scale = den > 0.0 ? num / den : 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double t = delta.values(i, j);
            if (!(t > 0.0))
                continue;
            const double r = (t - out.scale * (centers.row(i) - centers.row(j)).norm()) / t;
            out.value += r * r;
        }
    }
    return out;
}

double cluster_distance(const ClusterDeltaMatrix& delta, const Coordinates& x, const ClusterAssignment& ca) {
    return cluster_distance_detailed(delta, x, ca).value;
}

MetricReport evaluate(const Graph& g, const DistanceMatrix& d, const Coordinates& x,
                      const EvaluateOptions& options) {
    MetricReport report;
    report.radius = options.radius;
    report.ne = neighborhood_error(d, x, options.radius);
    report.scale = optimal_scale(d, x);
    report.stress = stress_metric(d, x);

    auto clusters = options.clusters ? *options.clusters : modularity_clusters(g, options.seed);
    if (clusters.count >= 2) {
        const auto delta = cluster_delta(g, clusters);
        const auto cd = cluster_distance_detailed(delta, x, clusters);
        report.cd = cd.value;
        report.cd_scale = cd.scale;
        if (cd.skipped_pairs > 0)
            report.warnings.push_back(std::to_string(cd.skipped_pairs) +
                                      " cluster pairs with delta = 0 skipped in CD");
    } else {
        report.warnings.push_back("fewer than two clusters; CD not reported");
    }
    report.clusters = std::move(clusters);
    return report;
}

}  // namespace lgs
