#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lgs/connectivity.hpp"
#include "lgs/graph.hpp"
#include "lgs/metrics.hpp"
#include "lgs/optimizer.hpp"

namespace lgs {

struct Dataset {
    Eigen::MatrixXd features;                     // n x D
    std::optional<std::vector<std::uint32_t>> labels;

    std::size_t size() const noexcept { return static_cast<std::size_t>(features.rows()); }
};

// Row-stochastic Gaussian affinities.
struct AffinityMatrix {
    Eigen::MatrixXd values;
    double sigma2 = 1.0;
};

// CSV of floats with an optional column named "label". A header row is optional.
Dataset read_dataset_csv(std::istream& in);

// Euclidean distances between rows.
DistanceMatrix euclidean_distances(const Dataset& data);

// Sample variance of the C(n,2) pairwise Euclidean distances.
double pairwise_distance_variance(const Dataset& data);

// w_ij = exp(-|x_i - x_j|^2 / sigma2), diagonal zeroed, rows normalized to 1.
// sigma2 = nullopt picks pairwise_distance_variance.
AffinityMatrix affinity_matrix(const Dataset& data, std::optional<double> sigma2 = std::nullopt);

// sum_{i=1..c} s^i W^i by iterated multiplication, diagonal zeroed.
Eigen::MatrixXd affinity_power_sum(const AffinityMatrix& w, int c, double s);

NeighborhoodPairs hd_neighborhoods(const AffinityMatrix& w, int c, double s, std::size_t k);

struct HdEmbedOptions {
    std::optional<double> sigma2;
};

Embedding hd_embed(const Dataset& data, const LgsParams& p, const HdEmbedOptions& options = {},
                   const EpochObserver& observer = {});

// Cluster dissimilarity from Euclidean distances between per-class means in feature space.
ClusterDeltaMatrix cluster_delta_hd(const Dataset& data, const ClusterAssignment& ca);

}  // namespace lgs
