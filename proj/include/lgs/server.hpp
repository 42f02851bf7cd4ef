#pragma once

#include <cstddef>
#include <memory>
#include <string>

namespace lgs {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;                          // 0 binds an ephemeral port (see Server::start)
    unsigned workers = 1;                     // concurrent embedding jobs
    std::size_t max_body_bytes = 32u << 20;   // larger uploads get 413
    std::size_t max_vertices = 20000;         // dense matrices beyond this get 413
    bool cache_results = true;                // identical (graph, params) jobs reuse a finished result
    int radius = 2;                           // NE radius for job metrics
};

// HTTP front end over the embedding pipeline.
//
//   POST /graphs                 edge list, Matrix Market, or {"model": ...} generator spec
//   GET  /graphs/{id}            n, edge count, diameter
//   POST /graphs/{id}/jobs       LgsParams as JSON, returns a job id
//   GET  /jobs/{id}              state, epoch progress, result when done
//   GET  /jobs/{id}/svg          rendered layout of a finished job
class Server {
public:
    explicit Server(ServerOptions options = {});
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    // Binds and serves on a background thread; returns the bound port.
    int start();
    // Binds and blocks until stop() is called from elsewhere.
    void listen();
    void stop();

    std::size_t graph_count() const;
    std::size_t job_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace lgs
