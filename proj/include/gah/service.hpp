#pragma once

// Local HTTP JSON API for the interactive explorer.
//
//   GET  /systems    available systems and their default parameters
//   POST /simulate   {system, params, angle, axis, t_span, x0, ...}        -> trajectory
//   POST /section    {system, params, angle, axis, coord, cut, direction, t_span, ...} -> crossings
//   POST /trap       {system, params, plane, quad, iters, points_per_edge, ...}        -> report + clouds
//   POST /iterate    {system, params, plane, seeds, k, ...}                -> orbits
//
// Status codes: 400 invalid request, 422 integration failure, 504 compute timeout.
// Every successful response echoes the validated request as `request` (JSON)
// and `config_text` (the CLI config format).

#include <atomic>
#include <memory>
#include <string>

#include <json.hpp>

#include "gah/config.hpp"

namespace gah {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8710;
    double timeout_seconds = 120;
    std::size_t max_points_per_edge = 1000;
    /// Exact allowed CORS origin; empty allows any loopback origin (localhost, 127.0.0.1, [::1]).
    std::string cors_origin;
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

ApiResponse handle_systems();
ApiResponse handle_simulate(const std::string& body, const ServiceOptions& opts);
ApiResponse handle_section(const std::string& body, const ServiceOptions& opts);
ApiResponse handle_trap(const std::string& body, const ServiceOptions& opts);
ApiResponse handle_iterate(const std::string& body, const ServiceOptions& opts);

/// Origin echoed in Access-Control-Allow-Origin, or empty when the origin is not allowed.
std::string allowed_origin(const std::string& origin, const ServiceOptions& opts);

/// Port from GAH_PORT if set, otherwise 8710.
int default_port();

class Service {
public:
    explicit Service(ServiceOptions opts);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the socket; returns the bound port (useful with port 0).
    int bind();
    /// Serves until stop(); call after bind().
    void run();
    void stop();
    const ServiceOptions& options() const { return opts_; }

private:
    struct Impl;
    ServiceOptions opts_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gah
