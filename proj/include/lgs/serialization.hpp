#pragma once

#include <json.hpp>

#include "lgs/generators.hpp"
#include "lgs/metrics.hpp"
#include "lgs/optimizer.hpp"

namespace lgs {

using json = nlohmann::json;

json to_json(const LgsParams& p);
// Missing keys keep their defaults; unknown keys and wrong types throw std::invalid_argument.
LgsParams params_from_json(const json& j, LgsParams base = {});

json to_json(const Provenance& p);
json to_json(const Embedding& e);   // {"coordinates": [[x, y], ...], "provenance": {...}}
json to_json(const MetricReport& r);

// {"model": "sbm-lattice" | "watts-strogatz", ...model fields..., "seed": n}
GeneratorParams generator_from_json(const json& j);
json to_json(const GeneratorParams& p);

// Applies "key = value" lines (TOML-style, '#' comments) onto params.
LgsParams params_from_config(std::istream& in, LgsParams base = {});

}  // namespace lgs
