#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgs/connectivity.hpp"
#include "lgs/graph.hpp"

namespace lgs {

using Vec2 = Eigen::Vector2d;
using Coordinates = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

struct LgsParams {
    std::size_t k = 16;
    int c = 10;
    double s = 0.1;
    double alpha = 0.2;
    int max_epochs = 60;
    double move_tol = 1e-7;
    std::optional<double> eta_max;  // defaults to d_max^2
    std::optional<double> eta_min;  // defaults to 0.01
    int switch_epoch = 15;
    // Per-pair learning rate ceiling. At 1/4 an attractive pair is moved exactly onto its
    // target distance, so larger rates overshoot.
    double rate_cap = 0.25;
    std::uint64_t seed = 0;
    ConnectivityMethod method = ConnectivityMethod::spectral;
    bool track_objective = false;  // evaluate the full objective after every epoch

    // Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    std::string canonical() const;
    std::uint64_t hash() const;
};

struct Provenance {
    std::uint64_t params_hash = 0;
    std::uint64_t seed = 0;
    std::size_t k_used = 0;
    int epochs = 0;
    bool converged = false;
    double final_objective = 0.0;
    double last_max_displacement = 0.0;
    std::vector<double> objective_history;  // filled when track_objective is set
    std::vector<std::string> warnings;
};

struct Embedding {
    Coordinates coords;
    Provenance provenance;

    std::size_t size() const noexcept { return static_cast<std::size_t>(coords.rows()); }
    Vec2 point(std::size_t i) const { return coords.row(static_cast<Eigen::Index>(i)).transpose(); }
};

struct ObjectiveValue {
    double value = 0.0;
    std::size_t coincident_pairs = 0;  // repulsive pairs evaluated at machine-epsilon separation
};

// sum_{attract} (|Xi - Xj| - d_ij)^2 - alpha * sum_{repel} log |Xi - Xj|.
// Throws std::domain_error on non-finite coordinates.
ObjectiveValue objective(const Coordinates& x, const NeighborhoodPairs& pairs, const DistanceMatrix& d,
                         double alpha);

struct PairTerm {
    enum class Kind { attract, repel } kind;
    double value;  // target distance for attract, alpha for repel

    static PairTerm attract(double d) { return {Kind::attract, d}; }
    static PairTerm repel(double alpha) { return {Kind::repel, alpha}; }
};

struct PairGradient {
    Vec2 gi;
    Vec2 gj;
};

// Gradient of one objective term with respect to both endpoints. Coincident points are
// separated along a unit direction derived from (i, j) before differentiating.
PairGradient pair_gradient(const Vec2& xi, const Vec2& xj, PairTerm term, std::uint32_t i = 0,
                           std::uint32_t j = 1);

// Unit direction used for coincident pairs; antisymmetric in (i, j).
Vec2 coincident_direction(std::uint32_t i, std::uint32_t j);

// Exponential decay from eta_max to eta_min over switch_epoch epochs, then eta_min * switch_epoch / t.
double step_size(int t, const LgsParams& p, double d_max);

// Called after every epoch with (epoch index starting at 1, max vertex displacement).
using EpochObserver = std::function<void(int, double)>;

struct PairVisit {
    std::uint32_t i;
    std::uint32_t j;
    double target;  // attract: graph distance; repel: -1
};

// Sees the visiting order of each epoch before it is applied.
using OrderObserver = std::function<void(int, std::span<const PairVisit>)>;

// SGD over all pairs with reshuffling per epoch. `d` supplies target distances for attractive pairs.
Embedding embed_pairs(const DistanceMatrix& d, const NeighborhoodPairs& pairs, const LgsParams& p,
                      const EpochObserver& observer = {}, const OrderObserver& order_observer = {});

// Full pipeline from a connected graph.
Embedding embed(const Graph& g, const LgsParams& p, const EpochObserver& observer = {});

// Pipeline with precomputed distances and connectivity (k is applied here).
Embedding embed(const DistanceMatrix& d, const ConnectivityMatrix& m, const LgsParams& p,
                const EpochObserver& observer = {});

// Clamp k into [1, n-1]; records a warning when it had to change.
std::size_t effective_k(std::size_t k, std::size_t n, std::vector<std::string>* warnings = nullptr);

void write_embedding_csv(const Embedding& e, std::ostream& out);
Embedding read_embedding_csv(std::istream& in);

}  // namespace lgs
