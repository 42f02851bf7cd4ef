// lgs: command-line front end for generating graphs, embedding, evaluating, rendering and sweeping k.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "lgs/connectivity.hpp"
#include "lgs/generators.hpp"
#include "lgs/graph.hpp"
#include "lgs/hd_adapter.hpp"
#include "lgs/metrics.hpp"
#include "lgs/optimizer.hpp"
#include "lgs/render.hpp"
#include "lgs/serialization.hpp"
#include "lgs/server.hpp"
#include "lgs/sweep.hpp"

namespace fs = std::filesystem;
using namespace lgs;

namespace {

struct ParamFlags {
    std::optional<std::size_t> k;
    std::optional<int> c;
    std::optional<double> s;
    std::optional<double> alpha;
    std::optional<int> max_epochs;
    std::optional<double> move_tol;
    std::optional<std::uint64_t> seed;
    std::optional<double> eta_max;
    std::optional<double> eta_min;
    std::optional<int> switch_epoch;
    std::optional<double> rate_cap;
    std::optional<std::string> method;
    std::string config;

    void attach(CLI::App* cmd) {
        cmd->add_option("--k", k, "neighborhood size");
        cmd->add_option("--c", c, "maximum walk length");
        cmd->add_option("--s", s, "walk damping in (0, 1]");
        cmd->add_option("--alpha", alpha, "repulsion strength");
        cmd->add_option("--max-epochs", max_epochs);
        cmd->add_option("--move-tol", move_tol, "stop when no vertex moves further in an epoch");
        cmd->add_option("--seed", seed);
        cmd->add_option("--eta-max", eta_max);
        cmd->add_option("--eta-min", eta_min);
        cmd->add_option("--switch-epoch", switch_epoch);
        cmd->add_option("--rate-cap", rate_cap);
        cmd->add_option("--method", method, "spectral or naive")->check(CLI::IsMember({"spectral", "naive"}));
        cmd->add_option("--config", config, "key = value parameter file; flags override it")
            ->check(CLI::ExistingFile);
    }

    LgsParams resolve() const {
        LgsParams p;
        if (!config.empty()) {
            std::ifstream in(config);
            p = params_from_config(in, p);
        }
        if (k) p.k = *k;
        if (c) p.c = *c;
        if (s) p.s = *s;
        if (alpha) p.alpha = *alpha;
        if (max_epochs) p.max_epochs = *max_epochs;
        if (move_tol) p.move_tol = *move_tol;
        if (seed) p.seed = *seed;
        if (eta_max) p.eta_max = *eta_max;
        if (eta_min) p.eta_min = *eta_min;
        if (switch_epoch) p.switch_epoch = *switch_epoch;
        if (rate_cap) p.rate_cap = *rate_cap;
        if (method) p.method = *method == "naive" ? ConnectivityMethod::naive : ConnectivityMethod::spectral;
        p.validate();
        return p;
    }
};

struct GraphInput {
    std::string path;
    bool weighted = false;
    bool largest = false;
    std::string labels_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("graph", path, "edge list, .mtx file, or .json generator spec")->required();
        cmd->add_flag("--weighted", weighted, "keep Matrix Market values as edge weights");
        cmd->add_flag("--largest-component", largest, "embed only the largest connected component");
        cmd->add_option("--labels", labels_path, "one cluster label per line, used for CD")
            ->check(CLI::ExistingFile);
    }
};

struct LoadedGraph {
    std::string name;
    Graph graph;
    std::optional<std::vector<std::uint32_t>> labels;
};

std::vector<std::uint32_t> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::vector<std::uint32_t> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        try {
            labels.push_back(static_cast<std::uint32_t>(std::stoul(line)));
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "expected a non-negative integer label");
        }
    }
    return labels;
}

LoadedGraph load(const GraphInput& in) {
    LoadedGraph out;
    const fs::path path(in.path);
    out.name = path.stem().string();
    if (path.extension() == ".json") {
        std::ifstream file(path);
        if (!file)
            throw std::runtime_error("cannot open " + in.path);
        auto generated = generate(generator_from_json(json::parse(file)));
        out.graph = std::move(generated.graph);
        if (!generated.labels.empty())
            out.labels = std::move(generated.labels);
    } else {
        const auto format = path.extension() == ".mtx" ? GraphFormat::matrix_market : GraphFormat::edge_list;
        out.graph = load_graph(path, format, {in.weighted});
    }
    if (!in.labels_path.empty())
        out.labels = read_labels(in.labels_path);

    if (connected_components(out.graph).count > 1) {
        if (!in.largest)
            throw std::runtime_error("graph is disconnected; pass --largest-component to embed its largest component");
        std::vector<vertex_t> kept;
        out.graph = largest_component(out.graph, kept);
        if (out.labels) {
            std::vector<std::uint32_t> sub;
            for (auto v : kept)
                sub.push_back(out.labels->at(v));
            out.labels = std::move(sub);
        }
        std::cerr << "using largest component: " << out.graph.vertex_count() << " vertices\n";
    }
    if (out.labels && out.labels->size() != out.graph.vertex_count())
        throw std::runtime_error("label count " + std::to_string(out.labels->size()) + " does not match " +
                                 std::to_string(out.graph.vertex_count()) + " vertices");
    return out;
}

fs::path default_output_dir() {
    if (const char* env = std::getenv("LGS_OUTPUT_DIR"); env && *env)
        return env;
    return ".";
}

fs::path output_path(const std::string& given, const std::string& fallback_name) {
    if (!given.empty())
        return given;
    const auto dir = default_output_dir();
    fs::create_directories(dir);
    return dir / fallback_name;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    fn(out);
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

Embedding read_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    return read_embedding_csv(in);
}

MetricReport metrics_for(const LoadedGraph& lg, const DistanceMatrix& d, const Coordinates& x, int radius) {
    EvaluateOptions eval;
    eval.radius = radius;
    if (lg.labels)
        eval.clusters = ClusterAssignment::from_labels(*lg.labels);
    return evaluate(lg.graph, d, x, eval);
}

std::vector<std::size_t> parse_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(std::stoul(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local-global graph embedding"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic benchmark graph");
    std::string model = "sbm-lattice", gen_out, gen_labels;
    SbmLatticeParams sbm;
    WattsStrogatzParams ws;
    std::uint64_t gen_seed = 0;
    gen->add_option("--model", model)->check(CLI::IsMember({"sbm-lattice", "watts-strogatz"}));
    gen->add_option("--rows", sbm.rows);
    gen->add_option("--cols", sbm.cols);
    gen->add_option("--cluster-size", sbm.cluster_size);
    gen->add_option("--p-in", sbm.p_in);
    gen->add_option("--p-adj", sbm.p_adj);
    gen->add_option("--p-far", sbm.p_far);
    gen->add_option("--n", ws.n);
    gen->add_option("--ring-degree", ws.ring_degree);
    gen->add_option("--rewire-p", ws.rewire_p);
    gen->add_option("--seed", gen_seed);
    gen->add_option("-o,--output", gen_out, "edge list path");
    gen->add_option("--labels-out", gen_labels, "write ground-truth labels here");

    // embed
    auto* emb = app.add_subcommand("embed", "compute a layout");
    GraphInput emb_in;
    ParamFlags emb_flags;
    std::string emb_out, emb_svg, emb_metrics, dataset_path;
    std::optional<double> sigma2;
    int emb_radius = 2;
    emb->add_option("graph", emb_in.path, "edge list, .mtx file, or .json generator spec");
    emb->add_flag("--weighted", emb_in.weighted);
    emb->add_flag("--largest-component", emb_in.largest);
    emb->add_option("--labels", emb_in.labels_path)->check(CLI::ExistingFile);
    emb->add_option("--dataset", dataset_path, "CSV of feature vectors instead of a graph")->check(CLI::ExistingFile);
    emb->add_option("--sigma2", sigma2, "Gaussian bandwidth for --dataset (default: variance of distances)");
    emb_flags.attach(emb);
    emb->add_option("-o,--output", emb_out, "layout CSV");
    emb->add_option("--svg", emb_svg, "also render the layout");
    emb->add_option("--metrics", emb_metrics, "also write the metric report as JSON");
    emb->add_option("--radius", emb_radius, "NE radius for --metrics");

    // metrics
    auto* met = app.add_subcommand("metrics", "evaluate NE, stress and CD of a layout");
    GraphInput met_in;
    std::string met_layout, met_out;
    int met_radius = 2;
    met_in.attach(met);
    met->add_option("layout", met_layout, "layout CSV")->required()->check(CLI::ExistingFile);
    met->add_option("--radius", met_radius);
    met->add_option("-o,--output", met_out, "JSON report path (stdout when absent)");

    // render
    auto* ren = app.add_subcommand("render", "draw a layout as SVG");
    GraphInput ren_in;
    std::string ren_layout, ren_out;
    ren_in.attach(ren);
    ren->add_option("layout", ren_layout, "layout CSV")->required()->check(CLI::ExistingFile);
    ren->add_option("-o,--output", ren_out);

    // sweep
    auto* swp = app.add_subcommand("sweep", "embed over a grid of k and seeds");
    GraphInput swp_in;
    ParamFlags swp_flags;
    std::string ks_text = "16,32,64,100,200", seeds_text = "0,1,2,3,4", swp_out;
    unsigned swp_workers = 0;
    bool no_svg = false;
    int swp_radius = 2;
    swp_in.attach(swp);
    swp_flags.attach(swp);
    swp->add_option("--ks", ks_text, "comma separated k values");
    swp->add_option("--seeds", seeds_text, "comma separated seeds");
    swp->add_option("--workers", swp_workers, "parallel runs (0 = hardware threads)");
    swp->add_option("--radius", swp_radius);
    swp->add_flag("--no-svg", no_svg);
    swp->add_option("-o,--output", swp_out, "output directory");

    // serve
    auto* srv = app.add_subcommand("serve", "run the HTTP job server");
    ServerOptions server_options;
    bool no_result_cache = false;
    srv->add_option("--host", server_options.host);
    srv->add_option("--port", server_options.port);
    srv->add_option("--workers", server_options.workers);
    srv->add_option("--max-vertices", server_options.max_vertices);
    srv->add_option("--max-body", server_options.max_body_bytes, "request size limit in bytes");
    srv->add_option("--radius", server_options.radius);
    srv->add_flag("--no-result-cache", no_result_cache);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            GeneratorParams params;
            if (model == "sbm-lattice") {
                sbm.seed = gen_seed;
                params = sbm;
            } else {
                if (gen->count("--ring-degree") == 0)
                    throw std::invalid_argument("watts-strogatz needs --ring-degree");
                ws.seed = gen_seed;
                params = ws;
            }
            auto generated = generate(params);
            const auto path = output_path(gen_out, model + ".edges");
            write_file(path, [&](std::ostream& out) { save_edge_list(generated.graph, out); });
            if (!gen_labels.empty() && !generated.labels.empty())
                write_file(gen_labels, [&](std::ostream& out) {
                    for (auto l : generated.labels)
                        out << l << '\n';
                });
            std::cerr << describe(params) << ": " << generated.graph.vertex_count() << " vertices, "
                      << generated.graph.edge_count() << " edges -> " << path.string() << '\n';
            return 0;
        }

        if (*emb) {
            const auto p = emb_flags.resolve();
            const bool tty = isatty(STDERR_FILENO);
            auto progress = [tty](int epoch, double moved) {
                if (tty)
                    std::cerr << "\repoch " << epoch << " max move " << moved << "        " << std::flush;
            };
            Embedding e;
            std::string stem;
            std::optional<LoadedGraph> lg;
            std::optional<DistanceMatrix> d;
            if (!dataset_path.empty()) {
                if (!emb_in.path.empty())
                    throw std::invalid_argument("give either a graph or --dataset, not both");
                std::ifstream in(dataset_path);
                const auto data = read_dataset_csv(in);
                e = hd_embed(data, p, {sigma2}, progress);
                stem = fs::path(dataset_path).stem().string();
            } else {
                if (emb_in.path.empty())
                    throw std::invalid_argument("missing graph argument");
                lg = load(emb_in);
                d = apsp(lg->graph);
                const auto m = compute_connectivity(lg->graph, p.c, p.s, p.method);
                e = embed(*d, m, p, progress);
                stem = lg->name;
            }
            if (tty)
                std::cerr << '\n';
            for (const auto& w : e.provenance.warnings)
                std::cerr << "warning: " << w << '\n';
            const auto path = output_path(emb_out, stem + "_k" + std::to_string(e.provenance.k_used) + ".csv");
            write_file(path, [&](std::ostream& out) { write_embedding_csv(e, out); });
            std::cerr << e.provenance.epochs << " epochs, objective " << e.provenance.final_objective << " -> "
                      << path.string() << '\n';
            if (!emb_svg.empty()) {
                if (!lg)
                    throw std::invalid_argument("--svg needs a graph input");
                write_file(emb_svg, [&](std::ostream& out) { out << render_svg(lg->graph, *d, e.coords); });
            }
            if (!emb_metrics.empty()) {
                if (!lg)
                    throw std::invalid_argument("--metrics needs a graph input");
                const auto report = metrics_for(*lg, *d, e.coords, emb_radius);
                write_file(emb_metrics, [&](std::ostream& out) { out << to_json(report).dump(2) << '\n'; });
            }
            return 0;
        }

        if (*met) {
            const auto lg = load(met_in);
            const auto e = read_layout(met_layout);
            if (e.size() != lg.graph.vertex_count())
                throw std::invalid_argument("layout has " + std::to_string(e.size()) + " rows, graph has " +
                                            std::to_string(lg.graph.vertex_count()) + " vertices");
            const auto report = metrics_for(lg, apsp(lg.graph), e.coords, met_radius);
            const auto text = to_json(report).dump(2);
            if (met_out.empty())
                std::cout << text << '\n';
            else
                write_file(met_out, [&](std::ostream& out) { out << text << '\n'; });
            return 0;
        }

        if (*ren) {
            const auto lg = load(ren_in);
            const auto e = read_layout(ren_layout);
            const auto path = output_path(ren_out, fs::path(ren_layout).stem().string() + ".svg");
            write_file(path, [&](std::ostream& out) { out << render_svg(lg.graph, e.coords); });
            return 0;
        }

        if (*swp) {
            auto lg = load(swp_in);
            SweepSpec spec;
            spec.name = lg.name;
            spec.graph = std::move(lg.graph);
            spec.labels = std::move(lg.labels);
            spec.ks = parse_list(ks_text);
            for (auto s : parse_list(seeds_text))
                spec.seeds.push_back(s);
            spec.base = swp_flags.resolve();
            spec.radius = swp_radius;
            spec.workers = swp_workers;
            spec.write_svg = !no_svg;
            spec.output_dir = swp_out.empty() ? default_output_dir() / ("sweep_" + spec.name) : fs::path(swp_out);
            const auto result = run_sweep(spec);

            write_summary_csv(result.summary, std::cout);
            std::cout << "spearman(ne, k) = " << result.trend.spearman_ne
                      << "\nspearman(stress, k) = " << result.trend.spearman_stress << '\n';
            if (result.trend.spearman_cd)
                std::cout << "spearman(cd, k) = " << *result.trend.spearman_cd << '\n';
            if (result.failures() > 0) {
                for (const auto& r : result.rows)
                    if (!r.ok())
                        std::cerr << "failed: k=" << r.k << " seed=" << r.seed << ": " << r.error << '\n';
                return 2;
            }
            return 0;
        }

        if (*srv) {
            server_options.cache_results = !no_result_cache;
            Server server(server_options);
            std::cerr << "listening on " << server_options.host << ':' << server_options.port << '\n';
            server.listen();
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
