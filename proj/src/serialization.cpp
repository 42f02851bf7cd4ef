#include "lgs/serialization.hpp"

#include <istream>
#include <stdexcept>
#include <string>

namespace lgs {

json to_json(const LgsParams& p) {
    json j = {{"k", p.k},
              {"c", p.c},
              {"s", p.s},
              {"alpha", p.alpha},
              {"max_epochs", p.max_epochs},
              {"move_tol", p.move_tol},
              {"switch_epoch", p.switch_epoch},
              {"rate_cap", p.rate_cap},
              {"track_objective", p.track_objective},
              {"seed", p.seed},
              {"method", p.method == ConnectivityMethod::spectral ? "spectral" : "naive"}};
    j["eta_max"] = p.eta_max ? json(*p.eta_max) : json(nullptr);
    j["eta_min"] = p.eta_min ? json(*p.eta_min) : json(nullptr);
    return j;
}

namespace {

template <typename T>
T get_as(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("parameter '") + key + "' has the wrong type");
    }
}

ConnectivityMethod parse_method(const std::string& text) {
    if (text == "spectral")
        return ConnectivityMethod::spectral;
    if (text == "naive")
        return ConnectivityMethod::naive;
    throw std::invalid_argument("method must be 'spectral' or 'naive'");
}

}  // namespace

LgsParams params_from_json(const json& j, LgsParams p) {
    if (!j.is_object())
        throw std::invalid_argument("parameters must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "k") {
            const auto k = get_as<std::int64_t>(j, "k");
            if (k < 1)
                throw std::invalid_argument("k must be >= 1");
            p.k = static_cast<std::size_t>(k);
        } else if (key == "c") {
            p.c = get_as<int>(j, "c");
        } else if (key == "s") {
            p.s = get_as<double>(j, "s");
        } else if (key == "alpha") {
            p.alpha = get_as<double>(j, "alpha");
        } else if (key == "max_epochs") {
            p.max_epochs = get_as<int>(j, "max_epochs");
        } else if (key == "move_tol") {
            p.move_tol = get_as<double>(j, "move_tol");
        } else if (key == "switch_epoch") {
            p.switch_epoch = get_as<int>(j, "switch_epoch");
        } else if (key == "rate_cap") {
            p.rate_cap = get_as<double>(j, "rate_cap");
        } else if (key == "track_objective") {
            p.track_objective = get_as<bool>(j, "track_objective");
        } else if (key == "seed") {
            p.seed = get_as<std::uint64_t>(j, "seed");
        } else if (key == "eta_max") {
            p.eta_max = value.is_null() ? std::nullopt : std::optional<double>(get_as<double>(j, "eta_max"));
        } else if (key == "eta_min") {
            p.eta_min = value.is_null() ? std::nullopt : std::optional<double>(get_as<double>(j, "eta_min"));
        } else if (key == "method") {
            p.method = parse_method(get_as<std::string>(j, "method"));
        } else {
            throw std::invalid_argument("unknown parameter '" + key + "'");
        }
    }
    p.validate();
    return p;
}

json to_json(const Provenance& p) {
    return {{"params_hash", p.params_hash},
            {"seed", p.seed},
            {"k", p.k_used},
            {"epochs", p.epochs},
            {"converged", p.converged},
            {"final_objective", p.final_objective},
            {"last_max_displacement", p.last_max_displacement},
            {"objective_history", p.objective_history},
            {"warnings", p.warnings}};
}

json to_json(const Embedding& e) {
    json coords = json::array();
    for (Eigen::Index v = 0; v < e.coords.rows(); ++v)
        coords.push_back({e.coords(v, 0), e.coords(v, 1)});
    return {{"coordinates", std::move(coords)}, {"provenance", to_json(e.provenance)}};
}

json to_json(const MetricReport& r) {
    json j = {{"ne", r.ne}, {"stress", r.stress}, {"radius", r.radius}, {"scale", r.scale}};
    j["cd"] = r.cd ? json(*r.cd) : json(nullptr);
    j["cd_scale"] = r.cd_scale ? json(*r.cd_scale) : json(nullptr);
    if (r.clusters) {
        j["clusters"] = {{"count", r.clusters->count},
                         {"source", r.clusters->source == ClusterAssignment::Source::modularity ? "modularity"
                                                                                                 : "given-labels"},
                         {"assignment", r.clusters->cluster}};
    } else {
        j["clusters"] = nullptr;
    }
    j["warnings"] = r.warnings;
    return j;
}

GeneratorParams generator_from_json(const json& j) {
    if (!j.is_object() || !j.contains("model"))
        throw std::invalid_argument("generator spec needs a 'model' field");
    const auto model = get_as<std::string>(j, "model");
    if (model == "sbm-lattice") {
        SbmLatticeParams p;
        for (const auto& [key, value] : j.items()) {
            if (key == "model")
                continue;
            if (key == "rows")
                p.rows = get_as<int>(j, "rows");
            else if (key == "cols")
                p.cols = get_as<int>(j, "cols");
            else if (key == "cluster_size")
                p.cluster_size = get_as<int>(j, "cluster_size");
            else if (key == "p_in")
                p.p_in = get_as<double>(j, "p_in");
            else if (key == "p_adj")
                p.p_adj = get_as<double>(j, "p_adj");
            else if (key == "p_far")
                p.p_far = get_as<double>(j, "p_far");
            else if (key == "seed")
                p.seed = get_as<std::uint64_t>(j, "seed");
            else
                throw std::invalid_argument("unknown generator field '" + key + "'");
        }
        return p;
    }
    if (model == "watts-strogatz") {
        WattsStrogatzParams p;
        for (const auto& [key, value] : j.items()) {
            if (key == "model")
                continue;
            if (key == "n")
                p.n = get_as<int>(j, "n");
            else if (key == "ring_degree")
                p.ring_degree = get_as<int>(j, "ring_degree");
            else if (key == "rewire_p")
                p.rewire_p = get_as<double>(j, "rewire_p");
            else if (key == "seed")
                p.seed = get_as<std::uint64_t>(j, "seed");
            else
                throw std::invalid_argument("unknown generator field '" + key + "'");
        }
        if (!j.contains("ring_degree"))
            throw std::invalid_argument("watts-strogatz needs an explicit ring_degree");
        return p;
    }
    throw std::invalid_argument("unknown generator model '" + model + "'");
}

json to_json(const GeneratorParams& g) {
    if (const auto* p = std::get_if<SbmLatticeParams>(&g)) {
        return {{"model", "sbm-lattice"}, {"rows", p->rows},   {"cols", p->cols},   {"cluster_size", p->cluster_size},
                {"p_in", p->p_in},        {"p_adj", p->p_adj}, {"p_far", p->p_far}, {"seed", p->seed}};
    }
    const auto& p = std::get<WattsStrogatzParams>(g);
    return {{"model", "watts-strogatz"},
            {"n", p.n},
            {"ring_degree", p.ring_degree},
            {"rewire_p", p.rewire_p},
            {"seed", p.seed}};
}

LgsParams params_from_config(std::istream& in, LgsParams base) {
    json overrides = json::object();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        if (trim(line).empty())
            continue;
        if (eq == std::string::npos)
            throw ParseError(lineno, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            overrides[key] = value.substr(1, value.size() - 2);
            continue;
        }
        try {
            overrides[key] = json::parse(value);
        } catch (const json::exception&) {
            throw ParseError(lineno, "cannot parse value for '" + key + "'");
        }
    }
    return params_from_json(overrides, base);
}

}  // namespace lgs
