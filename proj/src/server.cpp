#include "lgs/server.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <vector>

#include "lgs/connectivity.hpp"
#include "lgs/generators.hpp"
#include "lgs/metrics.hpp"
#include "lgs/optimizer.hpp"
#include "lgs/render.hpp"
#include "lgs/serialization.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that breaks Eigen's product kernels.
#include <httplib.h>

namespace lgs {

namespace {

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Thrown inside handlers, mapped to a status code by the exception handler.
struct HttpError : std::runtime_error {
    int status;
    HttpError(int status, const std::string& what) : std::runtime_error(what), status(status) {}
};

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                std::optional<std::size_t> line = std::nullopt) {
    json body = {{"error", message}};
    if (line)
        body["line"] = *line;
    send_json(res, status, body);
}

using ConnectivityKey = std::tuple<int, double, ConnectivityMethod>;

struct GraphEntry {
    std::string id;
    Graph graph;
    std::optional<std::vector<std::uint32_t>> labels;

    // Lazily computed, guarded by `mutex`.
    std::mutex mutex;
    std::shared_ptr<const DistanceMatrix> distances;
    std::map<ConnectivityKey, std::shared_ptr<const ConnectivityMatrix>> connectivity;
    std::optional<ClusterAssignment> clusters;

    std::shared_ptr<const DistanceMatrix> apsp_cached() {
        std::lock_guard lock(mutex);
        if (!distances)
            distances = std::make_shared<const DistanceMatrix>(apsp(graph));
        return distances;
    }

    std::shared_ptr<const ConnectivityMatrix> connectivity_cached(const LgsParams& p) {
        std::lock_guard lock(mutex);
        auto& slot = connectivity[{p.c, p.s, p.method}];
        if (!slot)
            slot = std::make_shared<const ConnectivityMatrix>(compute_connectivity(graph, p.c, p.s, p.method));
        return slot;
    }

    ClusterAssignment clusters_cached() {
        std::lock_guard lock(mutex);
        if (!clusters)
            clusters = labels ? ClusterAssignment::from_labels(*labels) : modularity_clusters(graph);
        return *clusters;
    }
};

enum class JobState { queued, running, done, failed };

const char* state_name(JobState s) {
    switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: return "failed";
    }
    return "unknown";
}

struct JobResult {
    json payload;  // {"embedding": ..., "metrics": ...}
    std::string svg;
};

struct Job {
    std::string id;
    std::shared_ptr<GraphEntry> graph;
    LgsParams params;
    std::atomic<JobState> state{JobState::queued};
    std::atomic<int> epoch{0};

    std::mutex mutex;  // guards result and error
    std::shared_ptr<const JobResult> result;
    std::string error;
};

}  // namespace

struct Server::Impl {
    ServerOptions options;
    httplib::Server http;

    mutable std::shared_mutex store_mutex;
    std::map<std::string, std::shared_ptr<GraphEntry>> graphs;
    std::map<std::string, std::shared_ptr<Job>> jobs;
    std::uint64_t next_job = 1;

    std::mutex cache_mutex;
    std::map<std::string, std::shared_ptr<const JobResult>> result_cache;  // graph id + params canonical

    std::mutex queue_mutex;
    std::condition_variable queue_cv;
    std::deque<std::shared_ptr<Job>> queue;
    bool stopping = false;
    std::atomic<bool> cancelled{false};  // aborts running jobs at shutdown
    std::vector<std::jthread> workers;
    std::jthread listener;

    explicit Impl(ServerOptions o) : options(std::move(o)) {
        if (options.workers == 0)
            options.workers = 1;
        http.set_payload_max_length(options.max_body_bytes);
        routes();
        for (unsigned i = 0; i < options.workers; ++i)
            workers.emplace_back([this] { work(); });
    }

    ~Impl() {
        http.stop();
        if (listener.joinable())
            listener.join();
        {
            std::lock_guard lock(queue_mutex);
            stopping = true;
        }
        cancelled = true;
        queue_cv.notify_all();
        workers.clear();
    }

    std::shared_ptr<GraphEntry> find_graph(const std::string& id) const {
        std::shared_lock lock(store_mutex);
        auto it = graphs.find(id);
        if (it == graphs.end())
            throw HttpError(404, "unknown graph '" + id + "'");
        return it->second;
    }

    std::shared_ptr<Job> find_job(const std::string& id) const {
        std::shared_lock lock(store_mutex);
        auto it = jobs.find(id);
        if (it == jobs.end())
            throw HttpError(404, "unknown job '" + id + "'");
        return it->second;
    }

    void routes() {
        http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const HttpError& e) {
                send_error(res, e.status, e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, e.what());
            } catch (...) {
                send_error(res, 500, "unknown error");
            }
        });
        http.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });

        http.Post("/graphs", [this](const httplib::Request& req, httplib::Response& res) { post_graph(req, res); });
        http.Get(R"(/graphs/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
            get_graph(req.matches[1], res);
        });
        http.Post(R"(/graphs/([0-9a-f]+)/jobs)", [this](const httplib::Request& req, httplib::Response& res) {
            post_job(req.matches[1], req.body, res);
        });
        http.Get(R"(/jobs/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
            get_job(req.matches[1], res);
        });
        http.Get(R"(/jobs/([A-Za-z0-9]+)/svg)", [this](const httplib::Request& req, httplib::Response& res) {
            get_svg(req.matches[1], res);
        });
    }

    void post_graph(const httplib::Request& req, httplib::Response& res) {
        const auto& body = req.body;
        const auto first = body.find_first_not_of(" \t\r\n");
        if (first == std::string::npos)
            return send_error(res, 400, "empty request body");

        auto entry = std::make_shared<GraphEntry>();
        try {
            if (body[first] == '{') {
                json spec;
                try {
                    spec = json::parse(body);
                } catch (const json::exception& e) {
                    return send_error(res, 400, std::string("invalid JSON: ") + e.what());
                }
                // benchmark graphs are always studied through their largest component
                auto generated = generate(generator_from_json(spec));
                std::vector<vertex_t> kept;
                entry->graph = largest_component(generated.graph, kept);
                if (!generated.labels.empty()) {
                    std::vector<std::uint32_t> labels;
                    for (auto v : kept)
                        labels.push_back(generated.labels[v]);
                    entry->labels = std::move(labels);
                }
            } else {
                std::istringstream in(body);
                entry->graph = body.compare(first, 14, "%%MatrixMarket") == 0 ? parse_matrix_market(in)
                                                                               : parse_edge_list(in);
            }
        } catch (const ParseError& e) {
            return send_error(res, 400, e.what(), e.line());
        } catch (const std::invalid_argument& e) {
            return send_error(res, 400, e.what());
        }

        const auto n = entry->graph.vertex_count();
        if (n > options.max_vertices)
            return send_error(res, 413, "graph has " + std::to_string(n) + " vertices, the limit is " +
                                            std::to_string(options.max_vertices));
        if (n < 2)
            return send_error(res, 422, "graph needs at least two vertices");
        if (connected_components(entry->graph).count != 1)
            return send_error(res, 422, "graph is disconnected; upload its largest component");

        std::string content = canonical_edge_list(entry->graph);
        content += "n=" + std::to_string(n) + "\n";
        if (entry->labels) {
            content += "labels:";
            for (auto l : *entry->labels)
                content += ' ' + std::to_string(l);
        }
        entry->id = hex64(fnv1a(content));

        bool created = false;
        {
            std::unique_lock lock(store_mutex);
            auto [it, inserted] = graphs.emplace(entry->id, entry);
            created = inserted;
            entry = it->second;
        }
        send_json(res, created ? 201 : 200, graph_summary(*entry, false));
    }

    json graph_summary(GraphEntry& e, bool with_diameter) {
        json j = {{"id", e.id},
                  {"n", e.graph.vertex_count()},
                  {"edges", e.graph.edge_count()},
                  {"weighted", e.graph.weighted()},
                  {"labels", e.labels.has_value()}};
        if (with_diameter)
            j["diameter"] = e.apsp_cached()->max();
        return j;
    }

    void get_graph(const std::string& id, httplib::Response& res) {
        auto entry = find_graph(id);
        send_json(res, 200, graph_summary(*entry, true));
    }

    void post_job(const std::string& graph_id, const std::string& body, httplib::Response& res) {
        auto entry = find_graph(graph_id);
        json j = json::object();
        if (body.find_first_not_of(" \t\r\n") != std::string::npos) {
            try {
                j = json::parse(body);
            } catch (const json::exception& e) {
                return send_error(res, 400, std::string("invalid JSON: ") + e.what());
            }
        }
        LgsParams p;
        try {
            p = params_from_json(j);
        } catch (const std::invalid_argument& e) {
            return send_error(res, 422, e.what());
        }
        const auto n = entry->graph.vertex_count();
        if (p.k >= n)
            return send_error(res, 422, "k=" + std::to_string(p.k) + " must be below n=" + std::to_string(n));

        auto job = std::make_shared<Job>();
        job->graph = entry;
        job->params = p;
        {
            std::unique_lock lock(store_mutex);
            job->id = "j" + std::to_string(next_job++);
            jobs.emplace(job->id, job);
        }
        {
            std::lock_guard lock(queue_mutex);
            queue.push_back(job);
        }
        queue_cv.notify_one();
        send_json(res, 202, {{"id", job->id}, {"state", "queued"}, {"params_hash", hex64(p.hash())}});
    }

    void get_job(const std::string& id, httplib::Response& res) {
        auto job = find_job(id);
        const auto state = job->state.load();
        json j = {{"id", job->id},
                  {"graph", job->graph->id},
                  {"state", state_name(state)},
                  {"progress", {{"epoch", job->epoch.load()}, {"max_epochs", job->params.max_epochs}}},
                  {"params", to_json(job->params)},
                  {"params_hash", hex64(job->params.hash())}};
        if (state == JobState::done || state == JobState::failed) {
            std::lock_guard lock(job->mutex);
            if (state == JobState::done)
                j["result"] = job->result->payload;
            else
                j["error"] = job->error;
        }
        send_json(res, 200, j);
    }

    void get_svg(const std::string& id, httplib::Response& res) {
        auto job = find_job(id);
        const auto state = job->state.load();
        if (state != JobState::done)
            return send_error(res, 409, std::string("job is ") + state_name(state));
        std::lock_guard lock(job->mutex);
        res.status = 200;
        res.set_content(job->result->svg, "image/svg+xml");
    }

    std::shared_ptr<const JobResult> compute(Job& job) {
        auto& entry = *job.graph;
        const auto d = entry.apsp_cached();
        const auto m = entry.connectivity_cached(job.params);
        const auto embedding = embed(*d, *m, job.params, [&](int epoch, double) {
            job.epoch.store(epoch);
            if (cancelled)
                throw std::runtime_error("server shut down");
        });

        EvaluateOptions eval;
        eval.radius = options.radius;
        eval.clusters = entry.clusters_cached();
        const auto report = evaluate(entry.graph, *d, embedding.coords, eval);

        auto result = std::make_shared<JobResult>();
        result->payload = {{"embedding", to_json(embedding)}, {"metrics", to_json(report)}};
        result->svg = render_svg(entry.graph, *d, embedding.coords);
        return result;
    }

    void run(Job& job) {
        job.state.store(JobState::running);
        const auto key = job.graph->id + "|" + job.params.canonical();
        try {
            std::shared_ptr<const JobResult> result;
            if (options.cache_results) {
                std::lock_guard lock(cache_mutex);
                if (auto it = result_cache.find(key); it != result_cache.end())
                    result = it->second;
            }
            if (result) {
                job.epoch.store(result->payload["embedding"]["provenance"]["epochs"].get<int>());
            } else {
                result = compute(job);
                if (options.cache_results) {
                    std::lock_guard lock(cache_mutex);
                    result_cache.emplace(key, result);
                }
            }
            {
                std::lock_guard lock(job.mutex);
                job.result = std::move(result);
            }
            job.state.store(JobState::done);
        } catch (const std::exception& e) {
            {
                std::lock_guard lock(job.mutex);
                job.error = e.what();
            }
            job.state.store(JobState::failed);
        }
    }

    void work() {
        for (;;) {
            std::shared_ptr<Job> job;
            {
                std::unique_lock lock(queue_mutex);
                queue_cv.wait(lock, [this] { return stopping || !queue.empty(); });
                if (stopping)
                    return;
                job = std::move(queue.front());
                queue.pop_front();
            }
            run(*job);
        }
    }
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() = default;

int Server::start() {
    auto& o = impl_->options;
    int port = o.port;
    if (port == 0) {
        port = impl_->http.bind_to_any_port(o.host);
        if (port < 0)
            throw std::runtime_error("cannot bind " + o.host);
    } else if (!impl_->http.bind_to_port(o.host, port)) {
        throw std::runtime_error("cannot bind " + o.host + ":" + std::to_string(port));
    }
    impl_->listener = std::jthread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return port;
}

void Server::listen() {
    auto& o = impl_->options;
    if (!impl_->http.listen(o.host, o.port))
        throw std::runtime_error("cannot listen on " + o.host + ":" + std::to_string(o.port));
}

void Server::stop() { impl_->http.stop(); }

std::size_t Server::graph_count() const {
    std::shared_lock lock(impl_->store_mutex);
    return impl_->graphs.size();
}

std::size_t Server::job_count() const {
    std::shared_lock lock(impl_->store_mutex);
    return impl_->jobs.size();
}

}  // namespace lgs
