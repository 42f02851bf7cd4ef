#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lgs/graph.hpp"

namespace lgs {

inline constexpr std::size_t default_dense_cap = 20000;

class EigenDecompositionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Walk-count similarity sum_{i=1..c} s^i A^i with the diagonal zeroed.
struct ConnectivityMatrix {
    Eigen::MatrixXd values;
    int c = 0;
    double s = 0.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

enum class ConnectivityMethod { naive, spectral };

// Iterated dense multiplication. Throws std::length_error above `dense_cap` vertices.
ConnectivityMatrix connectivity_matrix(const Graph& g, int c, double s,
                                       std::size_t dense_cap = default_dense_cap);

// Q (sum_i s^i Lambda^i) Q^T from the symmetric eigendecomposition of A.
// Throws EigenDecompositionError when the solver does not converge.
ConnectivityMatrix connectivity_matrix_spectral(const Graph& g, int c, double s,
                                                std::size_t dense_cap = default_dense_cap);

// Spectral path with a fallback to the naive one on solver failure.
ConnectivityMatrix compute_connectivity(const Graph& g, int c, double s,
                                        ConnectivityMethod method = ConnectivityMethod::spectral,
                                        std::size_t dense_cap = default_dense_cap);

// Partition of all unordered vertex pairs into attractive (neighborhood) and
// repulsive pairs. A pair is attractive when either endpoint selected the other.
class NeighborhoodPairs {
public:
    NeighborhoodPairs() = default;
    NeighborhoodPairs(std::size_t k, std::vector<std::vector<std::uint32_t>> neighborhoods);

    std::size_t k() const noexcept { return k_; }
    std::size_t vertex_count() const noexcept { return n_; }
    const std::vector<std::uint32_t>& neighborhood(std::size_t v) const { return neighborhoods_[v]; }

    bool attractive(std::size_t i, std::size_t j) const { return mask_[i * n_ + j] != 0; }

    std::size_t attract_count() const noexcept { return attract_count_; }
    std::size_t repel_count() const noexcept { return n_ * (n_ - 1) / 2 - attract_count_; }

    // Unordered pairs (i < j), lexicographic.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> attract_pairs() const;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> repel_pairs() const;

    // One "vertex,neighbor,rank" row per selected neighbor, for inspection.
    void write_csv(std::ostream& out) const;

private:
    std::size_t k_ = 0;
    std::size_t n_ = 0;
    std::vector<std::vector<std::uint32_t>> neighborhoods_;
    std::vector<std::uint8_t> mask_;  // n x n, symmetric
    std::size_t attract_count_ = 0;
};

// Top-k entries of each row, self excluded, ties to the smaller index.
// Works on any square similarity matrix; asymmetric rows are ranked independently.
NeighborhoodPairs select_neighborhoods(const Eigen::MatrixXd& similarity, std::size_t k);
inline NeighborhoodPairs select_neighborhoods(const ConnectivityMatrix& m, std::size_t k) {
    return select_neighborhoods(m.values, k);
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);

}  // namespace lgs
