#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lgs {

using vertex_t = std::uint32_t;

struct Edge {
    vertex_t u;
    vertex_t v;
    double w = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DisconnectedGraph : public std::runtime_error {
public:
    DisconnectedGraph(vertex_t source, vertex_t unreachable)
        : std::runtime_error("graph is disconnected: vertex " + std::to_string(unreachable) +
                             " is unreachable from vertex " + std::to_string(source)),
          source_(source), unreachable_(unreachable) {}

    vertex_t source() const noexcept { return source_; }
    vertex_t unreachable() const noexcept { return unreachable_; }

private:
    vertex_t source_;
    vertex_t unreachable_;
};

// Undirected simple graph. Edges are stored once with u < v, sorted.
class Graph {
public:
    Graph() = default;

    // Self-loops are dropped, duplicate undirected edges keep the first weight.
    // Throws std::invalid_argument on out-of-range endpoints or non-positive weights.
    Graph(std::size_t n, std::vector<Edge> edges);

    std::size_t vertex_count() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    bool weighted() const noexcept { return weighted_; }

    std::vector<std::vector<vertex_t>> adjacency_lists() const;
    Eigen::MatrixXd adjacency_matrix() const;  // 0/1 pattern

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    bool weighted_ = false;
};

// Symmetric matrix of graph-theoretic shortest-path distances.
struct DistanceMatrix {
    Eigen::MatrixXd values;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    double max() const { return values.size() == 0 ? 0.0 : values.maxCoeff(); }
};

enum class GraphFormat { edge_list, matrix_market };

struct LoadOptions {
    // Matrix Market values are discarded unless this is set.
    bool weighted = false;
};

Graph load_graph(const std::filesystem::path& path, GraphFormat format, LoadOptions options = {});
Graph parse_edge_list(std::istream& in);
Graph parse_matrix_market(std::istream& in, LoadOptions options = {});

// Canonical form: one "u v" (or "u v w") line per edge, sorted.
void save_edge_list(const Graph& g, std::ostream& out);
void save_graph(const Graph& g, const std::filesystem::path& path);
std::string canonical_edge_list(const Graph& g);

struct Components {
    std::vector<std::size_t> label;  // component id per vertex, ids ordered by smallest member
    std::size_t count = 0;
};

Components connected_components(const Graph& g);

// Induced subgraph on the largest component; ties go to the component holding the
// smallest original vertex index. Relabeling preserves input order.
Graph largest_component(const Graph& g);
Graph largest_component(const Graph& g, std::vector<vertex_t>& kept_vertices);

Graph induced_subgraph(const Graph& g, std::span<const vertex_t> vertices);

// BFS per source for unweighted graphs, Dijkstra otherwise. Throws DisconnectedGraph.
DistanceMatrix apsp(const Graph& g);

}  // namespace lgs
