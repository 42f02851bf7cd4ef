#include "lgs/graph.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <thread>

namespace lgs {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n) {
    for (auto& e : edges) {
        if (e.u >= n || e.v >= n)
            throw std::invalid_argument("edge endpoint out of range");
        if (!(e.w > 0.0))
            throw std::invalid_argument("edge weight must be positive");
        if (e.u > e.v)
            std::swap(e.u, e.v);
    }
    std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    auto last = std::unique(edges.begin(), edges.end(),
                            [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; });
    edges.erase(last, edges.end());
    weighted_ = std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.w != 1.0; });
    edges_ = std::move(edges);
}

std::vector<std::vector<vertex_t>> Graph::adjacency_lists() const {
    std::vector<std::vector<vertex_t>> adj(n_);
    for (const auto& e : edges_) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (auto& list : adj)
        std::sort(list.begin(), list.end());
    return adj;
}

Eigen::MatrixXd Graph::adjacency_matrix() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges_) {
        a(e.u, e.v) = 1.0;
        a(e.v, e.u) = 1.0;
    }
    return a;
}

namespace {

bool blank_or_comment(std::string_view line, char comment) {
    for (char ch : line) {
        if (ch == comment)
            return true;
        if (!std::isspace(static_cast<unsigned char>(ch)))
            return false;
    }
    return true;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        if (i > start)
            tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

}  // namespace

Graph parse_edge_list(std::istream& in) {
    struct RawEdge {
        std::int64_t a, b;
        double w;
    };
    std::vector<RawEdge> raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = line;
        if (auto hash = view.find('#'); hash != std::string_view::npos)
            view = view.substr(0, hash);
        auto tokens = split_ws(view);
        if (tokens.empty())
            continue;
        if (tokens.size() != 2 && tokens.size() != 3)
            throw ParseError(lineno, "expected 'u v' or 'u v w', got " + std::to_string(tokens.size()) + " fields");
        RawEdge e{0, 0, 1.0};
        if (!parse_number(tokens[0], e.a) || !parse_number(tokens[1], e.b) || e.a < 0 || e.b < 0)
            throw ParseError(lineno, "vertex ids must be non-negative integers");
        if (tokens.size() == 3 && (!parse_number(tokens[2], e.w) || !(e.w > 0.0) || !std::isfinite(e.w)))
            throw ParseError(lineno, "edge weight must be a positive number");
        raw.push_back(e);
    }
    if (raw.empty())
        throw ParseError(lineno, "empty graph");

    std::map<std::int64_t, vertex_t> relabel;
    for (const auto& e : raw) {
        relabel.emplace(e.a, 0);
        relabel.emplace(e.b, 0);
    }
    vertex_t next = 0;
    for (auto& [label, id] : relabel)
        id = next++;

    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const auto& e : raw)
        edges.push_back({relabel[e.a], relabel[e.b], e.w});
    return Graph(relabel.size(), std::move(edges));
}

Graph parse_matrix_market(std::istream& in, LoadOptions options) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line))
        throw ParseError(1, "missing Matrix Market header");
    ++lineno;
    auto header = split_ws(line);
    if (header.size() < 4 || header[0] != "%%MatrixMarket" || header[1] != "matrix" || header[2] != "coordinate")
        throw ParseError(lineno, "malformed header, expected '%%MatrixMarket matrix coordinate ...'");
    const std::string_view field = header[3];
    const bool pattern = field == "pattern";
    if (!pattern && field != "real" && field != "integer" && field != "double")
        throw ParseError(lineno, "unsupported field type '" + std::string(field) + "'");

    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_size = false;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line, '%'))
            continue;
        auto tokens = split_ws(line);
        if (!have_size) {
            if (tokens.size() != 3 || !parse_number(tokens[0], rows) || !parse_number(tokens[1], cols) ||
                !parse_number(tokens[2], nnz))
                throw ParseError(lineno, "malformed size line");
            if (rows != cols)
                throw ParseError(lineno, "adjacency matrix must be square");
            if (rows == 0)
                throw ParseError(lineno, "empty graph");
            have_size = true;
            edges.reserve(nnz);
            continue;
        }
        const std::size_t expected = pattern ? 2 : 3;
        std::size_t i = 0, j = 0;
        if (tokens.size() < expected || !parse_number(tokens[0], i) || !parse_number(tokens[1], j))
            throw ParseError(lineno, "malformed entry");
        if (i < 1 || j < 1 || i > rows || j > cols)
            throw ParseError(lineno, "index out of range");
        double w = 1.0;
        if (!pattern && options.weighted) {
            if (!parse_number(tokens[2], w))
                throw ParseError(lineno, "malformed value");
            w = std::abs(w);
            if (!(w > 0.0))
                continue;  // explicit zero: no edge
        }
        edges.push_back({static_cast<vertex_t>(i - 1), static_cast<vertex_t>(j - 1), w});
    }
    if (!have_size)
        throw ParseError(lineno, "missing size line");
    Graph g(rows, std::move(edges));
    if (g.edge_count() == 0)
        throw ParseError(lineno, "empty graph");
    return g;
}

Graph load_graph(const std::filesystem::path& path, GraphFormat format, LoadOptions options) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    return format == GraphFormat::edge_list ? parse_edge_list(in) : parse_matrix_market(in, options);
}

void save_edge_list(const Graph& g, std::ostream& out) {
    out << "# n=" << g.vertex_count() << " m=" << g.edge_count() << '\n';
    std::ostringstream w;
    w.precision(17);
    for (const auto& e : g.edges()) {
        out << e.u << ' ' << e.v;
        if (g.weighted()) {
            w.str({});
            w << e.w;
            out << ' ' << w.str();
        }
        out << '\n';
    }
}

void save_graph(const Graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    save_edge_list(g, out);
}

std::string canonical_edge_list(const Graph& g) {
    std::ostringstream out;
    save_edge_list(g, out);
    return out.str();
}

Components connected_components(const Graph& g) {
    const auto n = g.vertex_count();
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    Components result;
    result.label.assign(n, unset);
    const auto adj = g.adjacency_lists();
    std::vector<vertex_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (result.label[start] != unset)
            continue;
        const auto id = result.count++;
        result.label[start] = id;
        stack.push_back(static_cast<vertex_t>(start));
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto u : adj[v]) {
                if (result.label[u] == unset) {
                    result.label[u] = id;
                    stack.push_back(u);
                }
            }
        }
    }
    return result;
}

Graph induced_subgraph(const Graph& g, std::span<const vertex_t> vertices) {
    constexpr auto absent = std::numeric_limits<vertex_t>::max();
    std::vector<vertex_t> index(g.vertex_count(), absent);
    for (std::size_t i = 0; i < vertices.size(); ++i)
        index[vertices[i]] = static_cast<vertex_t>(i);
    std::vector<Edge> edges;
    for (const auto& e : g.edges()) {
        if (index[e.u] != absent && index[e.v] != absent)
            edges.push_back({index[e.u], index[e.v], e.w});
    }
    return Graph(vertices.size(), std::move(edges));
}

Graph largest_component(const Graph& g, std::vector<vertex_t>& kept_vertices) {
    const auto comps = connected_components(g);
    std::vector<std::size_t> sizes(comps.count, 0);
    for (auto id : comps.label)
        ++sizes[id];
    // ids are assigned in order of smallest member, so max_element's first hit is the tie-break
    const auto best = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    kept_vertices.clear();
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (comps.label[v] == best)
            kept_vertices.push_back(static_cast<vertex_t>(v));
    }
    if (kept_vertices.size() == g.vertex_count())
        return g;
    return induced_subgraph(g, kept_vertices);
}

Graph largest_component(const Graph& g) {
    std::vector<vertex_t> kept;
    return largest_component(g, kept);
}

namespace {

void bfs_row(const std::vector<std::vector<vertex_t>>& adj, vertex_t source, double* row) {
    const auto n = adj.size();
    std::fill(row, row + n, std::numeric_limits<double>::infinity());
    std::vector<vertex_t> frontier{source}, next;
    row[source] = 0.0;
    double depth = 0.0;
    while (!frontier.empty()) {
        depth += 1.0;
        next.clear();
        for (auto v : frontier) {
            for (auto u : adj[v]) {
                if (std::isinf(row[u])) {
                    row[u] = depth;
                    next.push_back(u);
                }
            }
        }
        std::swap(frontier, next);
    }
}

struct WeightedArc {
    vertex_t to;
    double w;
};

void dijkstra_row(const std::vector<std::vector<WeightedArc>>& adj, vertex_t source, double* row) {
    const auto n = adj.size();
    std::fill(row, row + n, std::numeric_limits<double>::infinity());
    using item = std::pair<double, vertex_t>;
    std::priority_queue<item, std::vector<item>, std::greater<>> queue;
    row[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        auto [dist, v] = queue.top();
        queue.pop();
        if (dist > row[v])
            continue;
        for (const auto& arc : adj[v]) {
            const double cand = dist + arc.w;
            if (cand < row[arc.to]) {
                row[arc.to] = cand;
                queue.emplace(cand, arc.to);
            }
        }
    }
}

template <typename RowFn>
void for_each_source(std::size_t n, RowFn&& fn) {
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n / 64));
    if (workers == 1) {
        for (std::size_t s = 0; s < n; ++s)
            fn(s);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t s = next++; s < n; s = next++)
                fn(s);
        });
    }
}

}  // namespace

DistanceMatrix apsp(const Graph& g) {
    const auto n = g.vertex_count();
    // column-major storage: column s holds distances from s, symmetric anyway
    Eigen::MatrixXd d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (!g.weighted()) {
        const auto adj = g.adjacency_lists();
        for_each_source(n, [&](std::size_t s) { bfs_row(adj, static_cast<vertex_t>(s), d.col(s).data()); });
    } else {
        std::vector<std::vector<WeightedArc>> adj(n);
        for (const auto& e : g.edges()) {
            adj[e.u].push_back({e.v, e.w});
            adj[e.v].push_back({e.u, e.w});
        }
        for_each_source(n, [&](std::size_t s) { dijkstra_row(adj, static_cast<vertex_t>(s), d.col(s).data()); });
    }
    for (Eigen::Index s = 0; s < d.cols(); ++s) {
        for (Eigen::Index t = 0; t < d.rows(); ++t) {
            if (std::isinf(d(t, s)))
                throw DisconnectedGraph(static_cast<vertex_t>(s), static_cast<vertex_t>(t));
        }
    }
    if (g.weighted())
        d = 0.5 * (d + d.transpose()).eval();
    return {std::move(d)};
}

}  // namespace lgs
