// Command-line driver: simulate, section, trap, gah-demo, serve.
//
// Settings are layered: built-in preset, then --config file, then flags.
// Failures print one line to stderr:
//   error: kind=<ErrorKind> message="<text>"
// Exit codes: 0 success, 1 verdict failed (outputs written), 2 invalid input,
// 3 computation failed.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gah/commands.hpp"
#include "gah/service.hpp"

namespace {

struct Flags {
    std::optional<std::string> config, preset, system, angle, cut, direction, quad, out_dir;
    std::optional<std::size_t> iters, points_per_edge;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "Key-value config file");
    cmd->add_option("--preset", f.preset, "Built-in preset: fig2, fig3, fig4");
    cmd->add_option("--system", f.system, "rossler, gah_system or gah_model");
    cmd->add_option("--angle", f.angle, "Plane rotation angle in radians (accepts forms like 2pi/5)");
    cmd->add_option("--cut", f.cut, "Cut value on the rotated coordinate");
    cmd->add_option("--direction", f.direction, "ascending, descending or both");
    cmd->add_option("--quad", f.quad, "Quadrilateral x1,y1:x2,y2:x3,y3:x4,y4");
    cmd->add_option("--iters", f.iters, "Number of return-map iterations");
    cmd->add_option("--points-per-edge", f.points_per_edge, "Interior points per quadrilateral edge");
    cmd->add_option("--out-dir", f.out_dir, "Output directory");
}

gah::RunConfig build_config(const Flags& f) {
    gah::RunConfig cfg = f.preset ? gah::preset(*f.preset) : gah::RunConfig{};
    if (f.config) cfg = gah::load_config(*f.config, cfg);
    if (f.system) gah::apply_setting(cfg, "system", "name", *f.system);
    if (f.angle) gah::apply_setting(cfg, "plane", "angle", *f.angle);
    if (f.cut) gah::apply_setting(cfg, "plane", "value", *f.cut);
    if (f.direction) gah::apply_setting(cfg, "plane", "direction", *f.direction);
    if (f.quad) gah::apply_setting(cfg, "quad", "vertices", *f.quad);
    if (f.iters) cfg.iterations = *f.iters;
    if (f.points_per_edge) cfg.points_per_edge = *f.points_per_edge;
    if (f.out_dir) cfg.out_dir = *f.out_dir;
    cfg.validate();
    return cfg;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

int fail(std::string_view kind, const std::string& message, int code) {
    std::cerr << "error: kind=" << kind << " message=" << quoted(message) << std::endl;
    return code;
}

gah::Service* running_service = nullptr;

extern "C" void on_signal(int) {
    if (running_service) running_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poincare sections, return maps and trapping regions of 3D flows"};
    app.require_subcommand(1);

    Flags flags;
    auto* simulate = app.add_subcommand("simulate", "Integrate the flow and write trajectory.csv");
    auto* section = app.add_subcommand("section", "Write the section crossings to crossings.csv");
    auto* trap = app.add_subcommand("trap", "Verify a trapping quadrilateral; writes report.json and clouds.csv");
    auto* demo = app.add_subcommand("gah-demo", "Image clouds of the constructed GAH system or the planar model");
    for (auto* cmd : {simulate, section, trap, demo}) add_run_flags(cmd, flags);

    auto* presets = app.add_subcommand("preset", "Print a built-in preset config");
    std::string preset_name;
    presets->add_option("name", preset_name, "fig2, fig3 or fig4")->required();

    gah::ServiceOptions service_opts;
    service_opts.port = gah::default_port();
    auto* serve = app.add_subcommand("serve", "Run the HTTP JSON service");
    serve->add_option("--port", service_opts.port, "TCP port (default GAH_PORT or 8710)");
    serve->add_option("--host", service_opts.host, "Bind address");
    serve->add_option("--timeout", service_opts.timeout_seconds, "Per-request compute timeout in seconds");
    serve->add_option("--max-points-per-edge", service_opts.max_points_per_edge, "Cap on points_per_edge");
    serve->add_option("--cors-origin", service_opts.cors_origin, "Allowed CORS origin (default: loopback origins)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("InvalidArgument", e.what(), 2);
    }

    if (presets->parsed()) {
        try {
            std::cout << gah::preset_text(preset_name);
            return 0;
        } catch (const gah::Error& e) {
            return fail(gah::to_string(e.kind()), e.what(), 2);
        }
    }

    if (serve->parsed()) {
        try {
            gah::Service service(service_opts);
            const int port = service.bind();
            running_service = &service;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "listening on http://" << service_opts.host << ":" << port << std::endl;
            service.run();
            running_service = nullptr;
            return 0;
        } catch (const gah::Error& e) {
            return fail(gah::to_string(e.kind()), e.what(), 2);
        }
    }

    gah::RunConfig cfg;
    try {
        cfg = build_config(flags);
    } catch (const gah::Error& e) {
        return fail(gah::to_string(e.kind()), e.what(), 2);
    }

    try {
        gah::CommandResult res;
        if (simulate->parsed()) res = gah::cmd_simulate(cfg);
        else if (section->parsed()) res = gah::cmd_section(cfg);
        else if (trap->parsed()) res = gah::cmd_trap(cfg);
        else res = gah::cmd_gah_demo(cfg);
        std::cout << res.summary << "\n";
        for (const auto& f : res.files) std::cout << "wrote " << (std::filesystem::path(cfg.out_dir) / f).string() << "\n";
        return res.ok ? 0 : 1;
    } catch (const gah::Error& e) {
        const bool invalid = e.kind() == gah::ErrorKind::InvalidArgument || e.kind() == gah::ErrorKind::OutOfDomain;
        return fail(gah::to_string(e.kind()), e.what(), invalid ? 2 : 3);
    } catch (const std::exception& e) {
        return fail("IoError", e.what(), 3);
    }
}
