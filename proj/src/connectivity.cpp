#include "lgs/connectivity.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

namespace lgs {

namespace {

void check_arguments(const Graph& g, int c, double s, std::size_t dense_cap) {
    if (c < 1)
        throw std::invalid_argument("walk cap c must be >= 1");
    if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("decay s must lie in (0, 1]");
    if (g.vertex_count() > dense_cap)
        throw std::length_error("graph has " + std::to_string(g.vertex_count()) +
                                " vertices, above the dense matrix cap of " + std::to_string(dense_cap));
}

}  // namespace

ConnectivityMatrix connectivity_matrix(const Graph& g, int c, double s, std::size_t dense_cap) {
    check_arguments(g, c, s, dense_cap);
    const Eigen::MatrixXd step = s * g.adjacency_matrix();
    Eigen::MatrixXd power = step;
    Eigen::MatrixXd sum = step;
    for (int i = 2; i <= c; ++i) {
        power = (power * step).eval();
        sum += power;
    }
    sum.diagonal().setZero();
    return {std::move(sum), c, s};
}

ConnectivityMatrix connectivity_matrix_spectral(const Graph& g, int c, double s, std::size_t dense_cap) {
    check_arguments(g, c, s, dense_cap);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.adjacency_matrix());
    if (solver.info() != Eigen::Success)
        throw EigenDecompositionError("symmetric eigendecomposition did not converge");

    Eigen::VectorXd weights(solver.eigenvalues().size());
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        const double x = s * solver.eigenvalues()(i);
        double term = 1.0, total = 0.0;
        for (int p = 1; p <= c; ++p) {
            term *= x;
            total += term;
        }
        weights(i) = total;
    }
    const auto& q = solver.eigenvectors();
    Eigen::MatrixXd sum = q * weights.asDiagonal() * q.transpose();
    sum = 0.5 * (sum + sum.transpose()).eval();
    sum.diagonal().setZero();
    return {std::move(sum), c, s};
}

ConnectivityMatrix compute_connectivity(const Graph& g, int c, double s, ConnectivityMethod method,
                                        std::size_t dense_cap) {
    if (method == ConnectivityMethod::spectral) {
        try {
            return connectivity_matrix_spectral(g, c, s, dense_cap);
        } catch (const EigenDecompositionError&) {
            // fall through to the naive path
        }
    }
    return connectivity_matrix(g, c, s, dense_cap);
}

NeighborhoodPairs::NeighborhoodPairs(std::size_t k, std::vector<std::vector<std::uint32_t>> neighborhoods)
    : k_(k), n_(neighborhoods.size()), neighborhoods_(std::move(neighborhoods)), mask_(n_ * n_, 0) {
    for (std::size_t v = 0; v < n_; ++v) {
        for (auto u : neighborhoods_[v]) {
            if (u == v || u >= n_)
                throw std::invalid_argument("neighborhood entry out of range or self");
            if (!mask_[v * n_ + u]) {
                mask_[v * n_ + u] = 1;
                mask_[u * n_ + v] = 1;
                ++attract_count_;
            }
        }
    }
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> NeighborhoodPairs::attract_pairs() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(attract_count_);
    for (std::uint32_t i = 0; i < n_; ++i)
        for (std::uint32_t j = i + 1; j < n_; ++j)
            if (attractive(i, j))
                out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> NeighborhoodPairs::repel_pairs() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(repel_count());
    for (std::uint32_t i = 0; i < n_; ++i)
        for (std::uint32_t j = i + 1; j < n_; ++j)
            if (!attractive(i, j))
                out.emplace_back(i, j);
    return out;
}

void NeighborhoodPairs::write_csv(std::ostream& out) const {
    out << "vertex,neighbor,rank\n";
    for (std::size_t v = 0; v < n_; ++v) {
        for (std::size_t r = 0; r < neighborhoods_[v].size(); ++r)
            out << v << ',' << neighborhoods_[v][r] << ',' << r << '\n';
    }
}

NeighborhoodPairs select_neighborhoods(const Eigen::MatrixXd& similarity, std::size_t k) {
    if (similarity.rows() != similarity.cols())
        throw std::invalid_argument("similarity matrix must be square");
    const auto n = static_cast<std::size_t>(similarity.rows());
    if (n < 2 || k < 1 || k > n - 1)
        throw std::invalid_argument("neighborhood size k must satisfy 1 <= k <= n-1");

    std::vector<std::vector<std::uint32_t>> neighborhoods(n);
    std::vector<std::uint32_t> order(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pos = 0;
        for (std::uint32_t j = 0; j < n; ++j)
            if (j != i)
                order[pos++] = j;
        const auto row = similarity.row(static_cast<Eigen::Index>(i));
        auto by_rank = [&](std::uint32_t a, std::uint32_t b) {
            const double va = row(a), vb = row(b);
            return va != vb ? va > vb : a < b;
        };
        const auto mid = order.begin() + static_cast<std::ptrdiff_t>(k);
        std::partial_sort(order.begin(), mid, order.end(), by_rank);
        neighborhoods[i].assign(order.begin(), mid);
    }
    return NeighborhoodPairs(k, std::move(neighborhoods));
}

void write_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
    const auto old = out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    out.precision(old);
}

}  // namespace lgs
