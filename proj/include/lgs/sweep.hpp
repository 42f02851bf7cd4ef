#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lgs/graph.hpp"
#include "lgs/metrics.hpp"
#include "lgs/optimizer.hpp"

namespace lgs {

struct SweepSpec {
    std::string name = "graph";
    Graph graph;
    std::optional<std::vector<std::uint32_t>> labels;  // ground-truth clusters for CD
    std::vector<std::size_t> ks;
    std::vector<std::uint64_t> seeds;
    LgsParams base;
    int radius = 2;
    std::optional<std::filesystem::path> output_dir;  // no files written when absent
    bool write_svg = true;
    unsigned workers = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct SweepRow {
    std::string graph;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    double ne = 0.0;
    double stress = 0.0;
    std::optional<double> cd;
    int epochs = 0;
    double objective = 0.0;
    std::vector<double> objective_history;  // only when base.track_objective is set
    bool converged = false;
    std::string error;  // non-empty when the run failed

    bool ok() const { return error.empty(); }
};

struct SweepSummaryRow {
    std::size_t k = 0;
    std::size_t runs = 0;
    double median_ne = 0.0;
    double median_stress = 0.0;
    std::optional<double> median_cd;
};

struct TrendReport {
    double spearman_ne = 0.0;      // median NE vs k
    double spearman_stress = 0.0;  // median stress vs k
    std::optional<double> spearman_cd;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // ordered by (k, seed) as listed in the spec
    std::vector<SweepSummaryRow> summary;
    TrendReport trend;

    std::size_t failures() const;
};

inline constexpr const char* sweep_csv_header = "graph,k,seed,ne,stress,cd,epochs,objective";

SweepResult run_sweep(const SweepSpec& spec);

std::vector<SweepSummaryRow> summarize(const std::vector<SweepRow>& rows);
TrendReport trend(const std::vector<SweepSummaryRow>& summary);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);
void write_summary_csv(const std::vector<SweepSummaryRow>& summary, std::ostream& out);

double median(std::vector<double> values);
// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace lgs
