#include "lgs/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lgs/connectivity.hpp"
#include "lgs/render.hpp"
#include "lgs/serialization.hpp"

namespace lgs {

void SweepSpec::validate() const {
    if (ks.empty())
        throw std::invalid_argument("sweep needs at least one k");
    if (seeds.empty())
        throw std::invalid_argument("sweep needs at least one seed");
    const auto n = graph.vertex_count();
    for (auto k : ks) {
        if (k < 1 || k > n - 1)
            throw std::invalid_argument("k=" + std::to_string(k) + " is not valid for a graph with " +
                                        std::to_string(n) + " vertices");
    }
    if (labels && labels->size() != n)
        throw std::invalid_argument("label count does not match the graph");
    base.validate();
}

std::size_t SweepResult::failures() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); }));
}

double median(std::vector<double> values) {
    if (values.empty())
        throw std::invalid_argument("median of an empty set");
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]])
            ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t)
            ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman needs two equally sized samples of size >= 2");
    const auto ra = average_ranks(a), rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0)
        return 0.0;
    return cov / std::sqrt(va * vb);
}

std::vector<SweepSummaryRow> summarize(const std::vector<SweepRow>& rows) {
    std::map<std::size_t, std::vector<const SweepRow*>> by_k;
    for (const auto& r : rows)
        if (r.ok())
            by_k[r.k].push_back(&r);
    std::vector<SweepSummaryRow> out;
    for (const auto& [k, group] : by_k) {
        SweepSummaryRow s;
        s.k = k;
        s.runs = group.size();
        std::vector<double> ne, stress, cd;
        for (const auto* r : group) {
            ne.push_back(r->ne);
            stress.push_back(r->stress);
            if (r->cd)
                cd.push_back(*r->cd);
        }
        s.median_ne = median(ne);
        s.median_stress = median(stress);
        if (!cd.empty())
            s.median_cd = median(cd);
        out.push_back(s);
    }
    return out;
}

TrendReport trend(const std::vector<SweepSummaryRow>& summary) {
    TrendReport t;
    if (summary.size() < 2)
        return t;
    std::vector<double> ks, ne, stress, cd;
    for (const auto& s : summary) {
        ks.push_back(static_cast<double>(s.k));
        ne.push_back(s.median_ne);
        stress.push_back(s.median_stress);
        if (s.median_cd)
            cd.push_back(*s.median_cd);
    }
    t.spearman_ne = spearman(ks, ne);
    t.spearman_stress = spearman(ks, stress);
    if (cd.size() == ks.size())
        t.spearman_cd = spearman(ks, cd);
    return t;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << sweep_csv_header << '\n';
    for (const auto& r : rows) {
        out << r.graph << ',' << r.k << ',' << r.seed << ',';
        if (r.ok()) {
            out << num(r.ne) << ',' << num(r.stress) << ',' << (r.cd ? num(*r.cd) : std::string{}) << ','
                << r.epochs << ',' << num(r.objective);
        } else {
            out << ",,,,";
        }
        out << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<SweepRow> rows;
    if (!std::getline(in, line) || line != sweep_csv_header)
        throw ParseError(1, "expected header '" + std::string(sweep_csv_header) + "'");
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            f.push_back(field);
        while (f.size() < 8)
            f.emplace_back();
        if (f.size() != 8)
            throw ParseError(lineno, "expected 8 fields");
        SweepRow r;
        try {
            r.graph = f[0];
            r.k = std::stoul(f[1]);
            r.seed = std::stoull(f[2]);
            if (f[3].empty()) {
                r.error = "failed";
            } else {
                r.ne = std::stod(f[3]);
                r.stress = std::stod(f[4]);
                if (!f[5].empty())
                    r.cd = std::stod(f[5]);
                r.epochs = std::stoi(f[6]);
                r.objective = std::stod(f[7]);
            }
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "malformed number");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_summary_csv(const std::vector<SweepSummaryRow>& summary, std::ostream& out) {
    out << "k,runs,median_ne,median_stress,median_cd\n";
    for (const auto& s : summary)
        out << s.k << ',' << s.runs << ',' << num(s.median_ne) << ',' << num(s.median_stress) << ','
            << (s.median_cd ? num(*s.median_cd) : std::string{}) << '\n';
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const auto& g = spec.graph;
    const auto d = apsp(g);
    const auto m = compute_connectivity(g, spec.base.c, spec.base.s, spec.base.method);
    EvaluateOptions eval;
    eval.radius = spec.radius;
    eval.seed = spec.base.seed;
    eval.clusters = spec.labels ? ClusterAssignment::from_labels(*spec.labels) : modularity_clusters(g);

    if (spec.output_dir)
        std::filesystem::create_directories(*spec.output_dir);

    struct Job {
        std::size_t k;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto k : spec.ks)
        for (auto seed : spec.seeds)
            jobs.push_back({k, seed});

    SweepResult result;
    result.rows.resize(jobs.size());
    auto run_one = [&](std::size_t index) {
        const auto& job = jobs[index];
        SweepRow& row = result.rows[index];
        row.graph = spec.name;
        row.k = job.k;
        row.seed = job.seed;
        try {
            LgsParams p = spec.base;
            p.k = job.k;
            p.seed = job.seed;
            const auto embedding = embed(d, m, p);
            const auto report = evaluate(g, d, embedding.coords, eval);
            row.ne = report.ne;
            row.stress = report.stress;
            row.cd = report.cd;
            row.epochs = embedding.provenance.epochs;
            row.objective = embedding.provenance.final_objective;
            row.objective_history = embedding.provenance.objective_history;
            row.converged = embedding.provenance.converged;
            if (spec.output_dir && spec.write_svg) {
                const auto file = *spec.output_dir / (spec.name + "_k" + std::to_string(job.k) + "_s" +
                                                      std::to_string(job.seed) + ".svg");
                std::ofstream out(file, std::ios::binary);
                if (!out)
                    throw std::runtime_error("cannot write " + file.string());
                out << render_svg(g, d, embedding.coords);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
            if (row.error.empty())
                row.error = "unknown error";
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = std::min<std::size_t>(spec.workers ? spec.workers : hw, jobs.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i)
            run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++)
                    run_one(i);
            });
    }

    result.summary = summarize(result.rows);
    result.trend = trend(result.summary);

    if (spec.output_dir) {
        std::ofstream csv(*spec.output_dir / "sweep.csv");
        write_sweep_csv(result.rows, csv);
        std::ofstream summary(*spec.output_dir / "summary.csv");
        write_summary_csv(result.summary, summary);
        json report = {{"graph", spec.name},
                       {"spearman_ne_vs_k", result.trend.spearman_ne},
                       {"spearman_stress_vs_k", result.trend.spearman_stress},
                       {"spearman_cd_vs_k", result.trend.spearman_cd ? json(*result.trend.spearman_cd) : json(nullptr)},
                       {"failures", result.failures()}};
        std::ofstream trend_out(*spec.output_dir / "trend.json");
        trend_out << report.dump(2) << '\n';
        if (result.failures() > 0) {
            std::ofstream errors(*spec.output_dir / "errors.txt");
            for (const auto& r : result.rows)
                if (!r.ok())
                    errors << r.graph << ",k=" << r.k << ",seed=" << r.seed << ": " << r.error << '\n';
        }
    }
    return result;
}

}  // namespace lgs
