#include "gah/service.hpp"

#include <chrono>
#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "gah/commands.hpp"
#include "gah/io.hpp"

namespace gah {

namespace {

using nlohmann::json;

std::string scalar_text(const json& v, const std::string& key) {
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number_float()) return io::format_real(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    throw Error(ErrorKind::InvalidArgument, "field '" + key + "' must be a number or string");
}

std::string pair_text(const json& v, const std::string& key) {
    require(v.is_array() && v.size() == 2, "field '" + key + "' must be an [x, y] array");
    return scalar_text(v[0], key) + "," + scalar_text(v[1], key);
}

Point2 to_point(const json& v, const std::string& key) {
    require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(),
            "field '" + key + "' must be an array of [x, y] numbers");
    return {v[0].get<double>(), v[1].get<double>()};
}

void apply_plane(RunConfig& cfg, const json& plane) {
    require(plane.is_object(), "field 'plane' must be an object");
    for (const auto& [key, value] : plane.items()) {
        if (key == "cut") apply_setting(cfg, "plane", "value", scalar_text(value, key));
        else if (key == "angle" || key == "axis" || key == "coord" || key == "value" || key == "direction")
            apply_setting(cfg, "plane", key, scalar_text(value, key));
        else throw Error(ErrorKind::InvalidArgument, "unknown field 'plane." + key + "'");
    }
}

void apply_params(RunConfig& cfg, const json& params) {
    require(params.is_object(), "field 'params' must be an object");
    for (const auto& [key, value] : params.items()) {
        if (value.is_array()) apply_setting(cfg, "system", key, pair_text(value, key));
        else apply_setting(cfg, "system", key, scalar_text(value, key));
    }
}

/// Builds a validated run configuration from a request body.
RunConfig request_config(const json& body, const ServiceOptions& opts, std::vector<Point2>* seeds = nullptr) {
    require(body.is_object(), "request body must be a JSON object");
    RunConfig cfg;
    cfg.points_per_edge = std::min<std::size_t>(cfg.points_per_edge, opts.max_points_per_edge);
    if (body.contains("system")) apply_setting(cfg, "system", "name", scalar_text(body["system"], "system"));
    for (const auto& [key, value] : body.items()) {
        if (key == "system") continue;
        if (key == "params") apply_params(cfg, value);
        else if (key == "plane") apply_plane(cfg, value);
        else if (key == "angle" || key == "axis" || key == "coord" || key == "direction")
            apply_setting(cfg, "plane", key, scalar_text(value, key));
        else if (key == "cut") apply_setting(cfg, "plane", "value", scalar_text(value, key));
        else if (key == "quad") {
            if (value.is_string()) {
                apply_setting(cfg, "quad", "vertices", value.get<std::string>());
            } else {
                require(value.is_array() && value.size() == 4, "field 'quad' must hold 4 vertices");
                std::string text;
                for (std::size_t i = 0; i < 4; ++i) text += (i ? ":" : "") + pair_text(value[i], "quad");
                apply_setting(cfg, "quad", "vertices", text);
            }
        } else if (key == "t_span") {
            require(value.is_array() && value.size() == 2, "field 't_span' must be [t0, t1]");
            apply_setting(cfg, "run", "t_start", scalar_text(value[0], key));
            apply_setting(cfg, "run", "t_end", scalar_text(value[1], key));
        } else if (key == "x0") {
            require(value.is_array() && value.size() == 3, "field 'x0' must be [x, y, z]");
            apply_setting(cfg, "run", "x0",
                          scalar_text(value[0], key) + "," + scalar_text(value[1], key) + "," + scalar_text(value[2], key));
        } else if (key == "iters" || key == "k") {
            require(value.is_number_integer(), "field '" + key + "' must be an integer");
            require(value.get<long long>() >= 0, "field '" + key + "' must be >= 1");
            apply_setting(cfg, "run", "iters", scalar_text(value, key));
        } else if (key == "points_per_edge" || key == "grid") {
            require(value.is_number_integer() && value.get<long long>() >= 0, "field '" + key + "' must be a non-negative integer");
            apply_setting(cfg, "run", key, scalar_text(value, key));
        } else if (key == "rel_tol" || key == "abs_tol" || key == "max_step" || key == "t_min" || key == "refine") {
            apply_setting(cfg, "run", key, scalar_text(value, key));
        } else if (key == "seeds" && seeds) {
            require(value.is_array() && !value.empty(), "field 'seeds' must be a non-empty array");
            require(value.size() <= 4 * (opts.max_points_per_edge + 1), "too many seeds");
            for (const auto& s : value) seeds->push_back(to_point(s, "seeds"));
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown field '" + key + "'");
        }
    }
    require(cfg.points_per_edge <= opts.max_points_per_edge,
            "points_per_edge exceeds the service cap of " + std::to_string(opts.max_points_per_edge));
    if (seeds) require(!seeds->empty(), "field 'seeds' is required");
    cfg.validate();
    cfg.integrator.deadline =
        Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(opts.timeout_seconds));
    return cfg;
}

int status_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::OutOfDomain:
        case ErrorKind::NoFixedPoint: return 400;
        case ErrorKind::Timeout: return 504;
        default: return 422;
    }
}

ApiResponse error_response(int status, std::string_view kind, const std::string& message) {
    return {status, {{"error", {{"kind", kind}, {"message", message}}}}};
}

template <typename Fn>
ApiResponse guarded(const std::string& body, Fn&& fn) {
    try {
        return fn(json::parse(body));
    } catch (const json::exception& e) {
        return error_response(400, "InvalidArgument", std::string("malformed JSON: ") + e.what());
    } catch (const Error& e) {
        return error_response(status_for(e.kind()), to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
        return error_response(500, "Internal", e.what());
    }
}

json echo(const RunConfig& cfg, json doc) {
    doc["request"] = config_json(cfg);
    doc["config_text"] = to_config_text(cfg);
    return doc;
}

}  // namespace

ApiResponse handle_systems() {
    const RunConfig d;
    json model = config_json([] {
        RunConfig c;
        c.system = SystemKind::GahModel;
        return c;
    }())["system"];
    return {200,
            {{"systems",
              json::array({{{"name", "rossler"},
                            {"dimension", 3},
                            {"params", {{"a", d.rossler.a}, {"b", d.rossler.b}, {"c", d.rossler.c}}},
                            {"endpoints", {"/simulate", "/section", "/trap", "/iterate"}}},
                           {{"name", "gah_system"}, {"dimension", 3}, {"params", json::object()}, {"endpoints", json::array()}},
                           {{"name", "gah_model"}, {"dimension", 2}, {"params", model["params"]}, {"endpoints", json::array()}}})},
             {"defaults", config_json(d)},
             {"presets", preset_names()}}};
}

ApiResponse handle_simulate(const std::string& body, const ServiceOptions& opts) {
    return guarded(body, [&](const json& req) {
        const RunConfig cfg = request_config(req, opts);
        const Trajectory<double> traj = compute_simulation(cfg);
        return ApiResponse{200, echo(cfg, {{"samples", io::trajectory_json(traj, cfg.plane)}})};
    });
}

ApiResponse handle_section(const std::string& body, const ServiceOptions& opts) {
    return guarded(body, [&](const json& req) {
        const RunConfig cfg = request_config(req, opts);
        const auto crossings = compute_section(cfg);
        return ApiResponse{200, echo(cfg, {{"count", crossings.size()}, {"crossings", io::crossings_json(crossings)}})};
    });
}

ApiResponse handle_trap(const std::string& body, const ServiceOptions& opts) {
    return guarded(body, [&](const json& req) {
        const RunConfig cfg = request_config(req, opts);
        const TrappingRun<double> run = compute_trap(cfg);
        return ApiResponse{200, echo(cfg, {{"report", trap_report_json(cfg, run)}, {"clouds", io::clouds_json(run)}})};
    });
}

ApiResponse handle_iterate(const std::string& body, const ServiceOptions& opts) {
    return guarded(body, [&](const json& req) {
        std::vector<Point2> seeds;
        const RunConfig cfg = request_config(req, opts, &seeds);
        const auto orbits = compute_iterate(cfg, seeds);
        return ApiResponse{200, echo(cfg, {{"orbits", orbits_json(cfg.plane, seeds, orbits)}})};
    });
}

std::string allowed_origin(const std::string& origin, const ServiceOptions& opts) {
    if (origin.empty()) return {};
    if (!opts.cors_origin.empty()) return origin == opts.cors_origin ? origin : std::string();
    static const std::regex loopback(R"(^https?://(localhost|127\.0\.0\.1|\[::1\])(:[0-9]+)?$)");
    return std::regex_match(origin, loopback) ? origin : std::string();
}

int default_port() {
    if (const char* env = std::getenv("GAH_PORT")) {
        const int p = std::atoi(env);
        if (p > 0 && p < 65536) return p;
    }
    return 8710;
}

struct Service::Impl {
    httplib::Server server;
    int port = -1;
};

Service::Service(ServiceOptions opts) : opts_(std::move(opts)), impl_(std::make_unique<Impl>()) {
    require(opts_.timeout_seconds > 0, "timeout must be > 0");
    auto& svr = impl_->server;
    const ServiceOptions& o = opts_;

    auto send = [](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_content(api.body.dump(), "application/json");
    };
    svr.Get("/systems", [send](const httplib::Request&, httplib::Response& res) { send(res, handle_systems()); });
    svr.Post("/simulate", [send, &o](const httplib::Request& req, httplib::Response& res) { send(res, handle_simulate(req.body, o)); });
    svr.Post("/section", [send, &o](const httplib::Request& req, httplib::Response& res) { send(res, handle_section(req.body, o)); });
    svr.Post("/trap", [send, &o](const httplib::Request& req, httplib::Response& res) { send(res, handle_trap(req.body, o)); });
    svr.Post("/iterate", [send, &o](const httplib::Request& req, httplib::Response& res) { send(res, handle_iterate(req.body, o)); });
    svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    svr.set_post_routing_handler([&o](const httplib::Request& req, httplib::Response& res) {
        const std::string origin = allowed_origin(req.get_header_value("Origin"), o);
        if (origin.empty()) return;
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Vary", "Origin");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
}

Service::~Service() { stop(); }

int Service::bind() {
    auto& svr = impl_->server;
    impl_->port = opts_.port == 0 ? svr.bind_to_any_port(opts_.host) : (svr.bind_to_port(opts_.host, opts_.port) ? opts_.port : -1);
    require(impl_->port > 0, "cannot bind " + opts_.host + ":" + std::to_string(opts_.port));
    return impl_->port;
}

void Service::run() {
    require(impl_->port > 0, "service is not bound");
    impl_->server.listen_after_bind();
}

void Service::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace gah
