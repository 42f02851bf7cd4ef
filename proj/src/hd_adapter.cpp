#include "lgs/hd_adapter.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lgs {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream in(line);
    std::string field;
    while (std::getline(in, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    for (auto& f : out) {
        const auto first = f.find_first_not_of(" \t\r");
        const auto last = f.find_last_not_of(" \t\r");
        f = first == std::string::npos ? std::string{} : f.substr(first, last - first + 1);
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (const std::logic_error&) {
        return false;
    }
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::size_t> label_column;
    std::size_t columns = 0;
    std::vector<std::vector<double>> rows;
    std::vector<std::uint32_t> labels;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#')
            continue;
        auto fields = split_csv(line);
        if (first) {
            first = false;
            double probe;
            bool header = false;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] == "label")
                    label_column = i;
                if (!parse_double(fields[i], probe))
                    header = true;
            }
            columns = fields.size();
            if (header)
                continue;
            label_column.reset();
        }
        if (fields.size() != columns)
            throw ParseError(lineno, "expected " + std::to_string(columns) + " fields");
        std::vector<double> row;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double value;
            if (!parse_double(fields[i], value) || !std::isfinite(value))
                throw ParseError(lineno, "non-numeric or non-finite value in column " + std::to_string(i + 1));
            if (label_column && i == *label_column) {
                if (value < 0 || value != std::floor(value))
                    throw ParseError(lineno, "label must be a non-negative integer");
                labels.push_back(static_cast<std::uint32_t>(value));
            } else {
                row.push_back(value);
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2)
        throw ParseError(lineno, "dataset needs at least two rows");
    Dataset data;
    const auto dims = rows.front().size();
    if (dims == 0)
        throw ParseError(lineno, "dataset has no feature columns");
    data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dims));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < dims; ++c)
            data.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    if (label_column)
        data.labels = std::move(labels);
    return data;
}

DistanceMatrix euclidean_distances(const Dataset& data) {
    const auto n = data.features.rows();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (data.features.row(i) - data.features.row(j)).norm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return {std::move(d)};
}

double pairwise_distance_variance(const Dataset& data) {
    const auto n = data.features.rows();
    double mean = 0.0, m2 = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (data.features.row(i) - data.features.row(j)).norm();
            ++count;
            const double delta = v - mean;
            mean += delta / static_cast<double>(count);
            m2 += delta * (v - mean);
        }
    }
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

AffinityMatrix affinity_matrix(const Dataset& data, std::optional<double> sigma2) {
    if (data.size() < 2)
        throw std::invalid_argument("dataset needs at least two rows");
    if (!data.features.allFinite())
        throw std::invalid_argument("dataset has non-finite entries");
    const double bandwidth = sigma2 ? *sigma2 : pairwise_distance_variance(data);
    if (!(bandwidth > 0.0))
        throw std::invalid_argument(sigma2 ? "sigma2 must be > 0"
                                           : "all rows coincide; automatic bandwidth is zero");
    const auto n = data.features.rows();
    Eigen::MatrixXd w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j)
            w(i, j) = i == j ? 0.0 : std::exp(-(data.features.row(i) - data.features.row(j)).squaredNorm() / bandwidth);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double total = w.row(i).sum();
        if (!(total > 0.0))
            throw std::domain_error("row " + std::to_string(i) + " has zero affinity mass; increase sigma2");
        w.row(i) /= total;
    }
    return {std::move(w), bandwidth};
}

Eigen::MatrixXd affinity_power_sum(const AffinityMatrix& w, int c, double s) {
    if (c < 1)
        throw std::invalid_argument("walk cap c must be >= 1");
    if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("decay s must lie in (0, 1]");
    const Eigen::MatrixXd step = s * w.values;
    Eigen::MatrixXd power = step;
    Eigen::MatrixXd sum = step;
    for (int i = 2; i <= c; ++i) {
        power = (power * step).eval();
        sum += power;
    }
    sum.diagonal().setZero();
    return sum;
}

NeighborhoodPairs hd_neighborhoods(const AffinityMatrix& w, int c, double s, std::size_t k) {
    return select_neighborhoods(affinity_power_sum(w, c, s), k);
}

Embedding hd_embed(const Dataset& data, const LgsParams& p, const HdEmbedOptions& options,
                   const EpochObserver& observer) {
    p.validate();
    const auto w = affinity_matrix(data, options.sigma2);
    std::vector<std::string> warnings;
    const auto k = effective_k(p.k, data.size(), &warnings);
    const auto pairs = hd_neighborhoods(w, p.c, p.s, k);
    auto result = embed_pairs(euclidean_distances(data), pairs, p, observer);
    result.provenance.warnings.insert(result.provenance.warnings.begin(), warnings.begin(), warnings.end());
    return result;
}

ClusterDeltaMatrix cluster_delta_hd(const Dataset& data, const ClusterAssignment& ca) {
    if (ca.cluster.size() != data.size())
        throw std::invalid_argument("cluster assignment and dataset disagree on row count");
    const auto m = static_cast<Eigen::Index>(ca.count);
    Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(m, data.features.cols());
    std::vector<double> sizes(ca.count, 0.0);
    for (Eigen::Index v = 0; v < data.features.rows(); ++v) {
        centers.row(ca.cluster[v]) += data.features.row(v);
        sizes[ca.cluster[v]] += 1.0;
    }
    for (Eigen::Index c = 0; c < m; ++c)
        centers.row(c) /= sizes[c];
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = i + 1; j < m; ++j)
            delta(i, j) = delta(j, i) = (centers.row(i) - centers.row(j)).norm();
    return {std::move(delta)};
}

}  // namespace lgs
