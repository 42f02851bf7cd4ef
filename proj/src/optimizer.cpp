#include "lgs/optimizer.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lgs/random.hpp"

namespace lgs {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

void LgsParams::validate() const {
    if (k < 1)
        throw std::invalid_argument("k must be >= 1");
    if (c < 1)
        throw std::invalid_argument("c must be >= 1");
    if (!(s > 0.0 && s <= 1.0))
        throw std::invalid_argument("s must lie in (0, 1]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be a finite value >= 0");
    if (max_epochs < 1)
        throw std::invalid_argument("max_epochs must be >= 1");
    if (!(move_tol >= 0.0))
        throw std::invalid_argument("move_tol must be >= 0");
    if (!(rate_cap > 0.0))
        throw std::invalid_argument("rate_cap must be > 0");
    if (switch_epoch < 1)
        throw std::invalid_argument("switch_epoch must be >= 1");
    if (eta_min && !(*eta_min > 0.0))
        throw std::invalid_argument("eta_min must be > 0");
    if (eta_max && eta_min && !(*eta_max >= *eta_min))
        throw std::invalid_argument("eta_max must be >= eta_min");
}

std::string LgsParams::canonical() const {
    std::ostringstream out;
    out.precision(17);
    out << "k=" << k << ";c=" << c << ";s=" << s << ";alpha=" << alpha << ";max_epochs=" << max_epochs
        << ";move_tol=" << move_tol << ";eta_max=";
    if (eta_max)
        out << *eta_max;
    out << ";eta_min=";
    if (eta_min)
        out << *eta_min;
    out << ";switch_epoch=" << switch_epoch << ";rate_cap=" << rate_cap << ";seed=" << seed
        << ";method=" << (method == ConnectivityMethod::spectral ? "spectral" : "naive");
    return out.str();
}

std::uint64_t LgsParams::hash() const { return fnv1a(canonical()); }

ObjectiveValue objective(const Coordinates& x, const NeighborhoodPairs& pairs, const DistanceMatrix& d,
                         double alpha) {
    if (!x.allFinite())
        throw std::domain_error("embedding has non-finite coordinates");
    const auto n = static_cast<std::size_t>(x.rows());
    ObjectiveValue out;
    double stress = 0.0, entropy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dist = (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).norm();
            if (pairs.attractive(i, j)) {
                const double r = dist - d(i, j);
                stress += r * r;
            } else {
                if (dist == 0.0) {
                    ++out.coincident_pairs;
                    entropy += std::log(std::numeric_limits<double>::epsilon());
                } else {
                    entropy += std::log(dist);
                }
            }
        }
    }
    out.value = stress - alpha * entropy;
    return out;
}

Vec2 coincident_direction(std::uint32_t i, std::uint32_t j) {
    const auto lo = std::min(i, j), hi = std::max(i, j);
    const auto h = splitmix64((static_cast<std::uint64_t>(lo) << 32) | hi);
    const double angle = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
    Vec2 u(std::cos(angle), std::sin(angle));
    return i < j ? u : Vec2(-u);
}

PairGradient pair_gradient(const Vec2& xi, const Vec2& xj, PairTerm term, std::uint32_t i, std::uint32_t j) {
    Vec2 delta = xi - xj;
    double norm = delta.norm();
    if (norm == 0.0) {
        delta = coincident_direction(i, j);
        norm = 1.0;
    }
    Vec2 gi;
    if (term.kind == PairTerm::Kind::attract)
        gi = 2.0 * (norm - term.value) * delta / norm;
    else
        gi = -term.value * delta / (norm * norm);
    return {gi, -gi};
}

double step_size(int t, const LgsParams& p, double d_max) {
    if (t < 0)
        throw std::invalid_argument("epoch index must be >= 0");
    const double eta_max = p.eta_max.value_or(d_max * d_max);
    const double eta_min = p.eta_min.value_or(0.01);
    if (t >= p.switch_epoch)
        return eta_min * static_cast<double>(p.switch_epoch) / static_cast<double>(t);
    const double lambda = std::log(eta_max / eta_min) / static_cast<double>(p.switch_epoch);
    return eta_max * std::exp(-lambda * static_cast<double>(t));
}

std::size_t effective_k(std::size_t k, std::size_t n, std::vector<std::string>* warnings) {
    if (n < 2)
        throw std::invalid_argument("embedding needs at least two vertices");
    if (k >= n) {
        if (warnings)
            warnings->push_back("k=" + std::to_string(k) + " clamped to n-1=" + std::to_string(n - 1));
        return n - 1;
    }
    return std::max<std::size_t>(k, 1);
}

Embedding embed_pairs(const DistanceMatrix& d, const NeighborhoodPairs& pairs, const LgsParams& p,
                      const EpochObserver& observer, const OrderObserver& order_observer) {
    p.validate();
    const auto n = d.size();
    if (n < 2 || pairs.vertex_count() != n)
        throw std::invalid_argument("distance matrix and neighborhood pairs disagree on vertex count");
    const double d_max = d.max();
    if (!(d_max > 0.0))
        throw std::invalid_argument("distance matrix must contain a positive entry");

    Embedding out;
    out.provenance.params_hash = p.hash();
    out.provenance.seed = p.seed;
    out.provenance.k_used = pairs.k();

    Rng rng(p.seed);
    Coordinates& x = out.coords;
    x.resize(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index v = 0; v < x.rows(); ++v) {
        x(v, 0) = rng.uniform();
        x(v, 1) = rng.uniform();
    }

    std::vector<PairVisit> terms;
    terms.reserve(n * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            terms.push_back({i, j, pairs.attractive(i, j) ? d(i, j) : -1.0});

    const double alpha = p.alpha;
    Coordinates start;
    for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
        const double eta = std::min(step_size(epoch, p, d_max), p.rate_cap);
        rng.shuffle(terms.begin(), terms.end());
        if (order_observer)
            order_observer(epoch + 1, terms);
        start = x;
        for (const auto& t : terms) {
            double* xi = &x(t.i, 0);
            double* xj = &x(t.j, 0);
            double dx = xi[0] - xj[0], dy = xi[1] - xj[1];
            double norm = std::sqrt(dx * dx + dy * dy);
            if (norm == 0.0) {
                const Vec2 u = coincident_direction(t.i, t.j);
                dx = u.x();
                dy = u.y();
                norm = 1.0;
            }
            // step = eta * gradient w.r.t. xi, along delta
            double scale = t.target >= 0.0 ? eta * 2.0 * (norm - t.target) / norm : -eta * alpha / (norm * norm);
            const double length = std::abs(scale) * norm;
            if (length > d_max)
                scale *= d_max / length;
            xi[0] -= scale * dx;
            xi[1] -= scale * dy;
            xj[0] += scale * dx;
            xj[1] += scale * dy;
        }
        if (!x.allFinite())
            throw std::runtime_error("optimization diverged at epoch " + std::to_string(epoch + 1));

        const double moved = (x - start).rowwise().norm().maxCoeff();
        out.provenance.epochs = epoch + 1;
        out.provenance.last_max_displacement = moved;
        if (p.track_objective)
            out.provenance.objective_history.push_back(objective(x, pairs, d, alpha).value);
        if (observer)
            observer(epoch + 1, moved);
        if (moved < p.move_tol) {
            out.provenance.converged = true;
            break;
        }
    }

    const auto final_value = objective(x, pairs, d, alpha);
    out.provenance.final_objective = final_value.value;
    if (final_value.coincident_pairs > 0)
        out.provenance.warnings.push_back(std::to_string(final_value.coincident_pairs) +
                                          " coincident repulsive pairs in the final layout");
    if (!std::isfinite(final_value.value))
        throw std::runtime_error("objective is not finite after optimization");
    return out;
}

Embedding embed(const DistanceMatrix& d, const ConnectivityMatrix& m, const LgsParams& p,
                const EpochObserver& observer) {
    p.validate();
    std::vector<std::string> warnings;
    const auto k = effective_k(p.k, d.size(), &warnings);
    auto result = embed_pairs(d, select_neighborhoods(m, k), p, observer);
    result.provenance.warnings.insert(result.provenance.warnings.begin(), warnings.begin(), warnings.end());
    return result;
}

Embedding embed(const Graph& g, const LgsParams& p, const EpochObserver& observer) {
    p.validate();
    const auto d = apsp(g);
    const auto m = compute_connectivity(g, p.c, p.s, p.method);
    return embed(d, m, p, observer);
}

void write_embedding_csv(const Embedding& e, std::ostream& out) {
    const auto old = out.precision(17);
    out << "vertex,x,y\n";
    for (Eigen::Index v = 0; v < e.coords.rows(); ++v)
        out << v << ',' << e.coords(v, 0) << ',' << e.coords(v, 1) << '\n';
    out.precision(old);
}

Embedding read_embedding_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("vertex", 0) == 0)
            continue;
        std::istringstream fields(line);
        std::string vertex, xs, ys;
        if (!std::getline(fields, vertex, ',') || !std::getline(fields, xs, ',') || !std::getline(fields, ys))
            throw ParseError(lineno, "expected 'vertex,x,y'");
        std::size_t idx = 0;
        try {
            idx = std::stoul(vertex);
            if (idx != rows.size())
                throw ParseError(lineno, "vertices must be listed in order 0..n-1");
            rows.emplace_back(std::stod(xs), std::stod(ys));
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "malformed number");
        }
    }
    Embedding e;
    e.coords.resize(static_cast<Eigen::Index>(rows.size()), 2);
    for (std::size_t v = 0; v < rows.size(); ++v) {
        e.coords(static_cast<Eigen::Index>(v), 0) = rows[v].first;
        e.coords(static_cast<Eigen::Index>(v), 1) = rows[v].second;
    }
    return e;
}

}  // namespace lgs
