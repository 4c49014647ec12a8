#include "gah/commands.hpp"

#include <sstream>

#include "gah/io.hpp"

namespace gah {

namespace {

void require_rossler(const RunConfig& cfg, const char* command) {
    require(cfg.system == SystemKind::Rossler,
            std::string(command) + " needs a three-dimensional flow; system must be rossler");
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.out_dir) / name;
}

template <typename Writer>
std::string render(Writer&& w) {
    std::ostringstream os;
    w(os);
    return os.str();
}

}  // namespace

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

Trajectory<double> compute_simulation(const RunConfig& cfg) {
    cfg.validate();
    require_rossler(cfg, "simulate");
    return integrate(Rossler<double>{cfg.rossler}, cfg.integrator);
}

std::vector<Crossing<double>> compute_section(const RunConfig& cfg) {
    return find_crossings(compute_simulation(cfg), cfg.plane, cfg.refine);
}

TrappingRun<double> compute_trap(const RunConfig& cfg) {
    cfg.validate();
    require_rossler(cfg, "trap");
    TrappingOptions<double> opts;
    opts.points_per_edge = cfg.points_per_edge;
    opts.iterations = cfg.iterations;
    opts.returns = cfg.return_options();
    return verify_trapping(cfg.quad, cfg.plane, Rossler<double>{cfg.rossler}, cfg.integrator, opts);
}

std::vector<MapOrbit<double>> compute_iterate(const RunConfig& cfg, const std::vector<Point2>& seeds) {
    cfg.validate();
    require_rossler(cfg, "iterate");
    for (const auto& s : seeds) require(all_finite(s), "seeds must be finite");
    const Rossler<double> field{cfg.rossler};
    const ReturnOptions<double> opts = cfg.return_options();
    std::vector<MapOrbit<double>> orbits(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        orbits[i] = iterate_map(cfg.plane.lift(seeds[i]), cfg.plane, field, cfg.integrator, cfg.iterations, opts);
    });
    return orbits;
}

nlohmann::json trap_report_json(const RunConfig& cfg, const TrappingRun<double>& run) {
    nlohmann::json doc = io::report_json(run.report);
    doc["points_per_edge"] = cfg.points_per_edge;
    doc["iterations"] = cfg.iterations;
    nlohmann::json areas = nlohmann::json::array();
    for (std::size_t j = 0; j < run.clouds.size(); ++j) areas.push_back(hull_area(run.cloud_points(j)));
    doc["hull_areas"] = areas;
    if (run.clouds.size() > 1 && run.report.trapping()) {
        const NestingCheck nest = check_nesting(run);
        doc["nesting"] = {{"nested", nest.nested}, {"slack", nest.slack}, {"min_margin", nest.min_margin}};
    }
    doc["config"] = config_json(cfg);
    return doc;
}

nlohmann::json orbits_json(const SectionPlane<double>& plane, const std::vector<Point2>& seeds,
                           const std::vector<MapOrbit<double>>& orbits) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        nlohmann::json images = nlohmann::json::array();
        nlohmann::json flights = nlohmann::json::array();
        for (const auto& r : orbits[i].results) {
            images.push_back(io::point_json(plane.planar(r.image)));
            flights.push_back(r.flight_time);
        }
        nlohmann::json o = {{"seed", io::point_json(seeds[i])}, {"images", images}, {"flight_times", flights}};
        if (orbits[i].failed_at) {
            o["failed_at"] = *orbits[i].failed_at;
            o["failure"] = {{"kind", std::string(to_string(*orbits[i].failure))}, {"message", orbits[i].message}};
        }
        out.push_back(o);
    }
    return out;
}

GahSystemDemo compute_gah_system_demo(const RunConfig& cfg) {
    cfg.validate();
    GahSystemDemo demo;
    demo.seeds = q0_grid(cfg.grid);
    demo.images = gah_poincare_image(demo.seeds);
    return demo;
}

nlohmann::json gah_system_report_json(const GahSystemDemo& demo) {
    const TransversalSquare q0;
    std::size_t mapped = 0, inside = 0;
    std::optional<double> min_margin;
    double r_lo = std::numeric_limits<double>::infinity(), r_hi = -r_lo;
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& im : demo.images) {
        if (!im.image) {
            failures.push_back({{"seed", io::point_json(im.seed)}, {"message", im.error}});
            continue;
        }
        ++mapped;
        const double m = q0.margin(im.image->x(), im.image->y());
        if (m > 0) ++inside;
        min_margin = min_margin ? std::min(*min_margin, m) : m;
        r_lo = std::min(r_lo, im.image->x());
        r_hi = std::max(r_hi, im.image->x());
    }
    return {{"seeds", demo.seeds.size()},
            {"mapped", mapped},
            {"inside", inside},
            {"contained", mapped == demo.seeds.size() && inside == mapped},
            {"min_margin", min_margin ? nlohmann::json(*min_margin) : nlohmann::json(nullptr)},
            {"image_r_extent", mapped ? nlohmann::json(r_hi - r_lo) : nlohmann::json(nullptr)},
            {"failures", failures}};
}

GahModelDemo compute_gah_model_demo(const RunConfig& cfg) {
    cfg.validate();
    GahModelDemo demo;
    demo.grid = rect_grid(cfg.region, cfg.grid);
    demo.iterates = iterate_region(cfg.model, cfg.region, cfg.iterations, cfg.grid);
    return demo;
}

nlohmann::json gah_model_report_json(const RunConfig& cfg, const GahModelDemo& demo) {
    const auto& q = cfg.region;
    nlohmann::json doc;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : demo.iterates.clouds.front()) min_margin = std::min(min_margin, q.margin(p));
    doc["image_min_margin"] = min_margin;
    doc["trapping"] = min_margin > 0;
    try {
        const Point2 p = straight_leg_fixed_point(cfg.model, q);
        const StarCheck<double> star = check_star(cfg.model, q);
        doc["fixed_point"] = io::point_json(p);
        doc["eigenvalues"] = {cfg.model.lambda_h, cfg.model.lambda_v};
        doc["star"] = {{"holds", star.holds}, {"witness", io::point_json(star.witness)}};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoFixedPoint) throw;
        doc["fixed_point"] = nullptr;
        doc["star"] = {{"holds", false}, {"error", e.what()}};
    }
    nlohmann::json nesting = nlohmann::json::array();
    nlohmann::json areas = nlohmann::json::array();
    for (std::size_t k = 0; k < demo.iterates.clouds.size(); ++k) {
        areas.push_back(hull_area(demo.iterates.clouds[k]));
        if (k > 0) nesting.push_back(min_margin_in_hull(demo.iterates.clouds[k], demo.iterates.clouds[k - 1]));
    }
    doc["hull_areas"] = areas;
    doc["nesting_min_margin"] = nesting;
    doc["grid_spacing"] = demo.iterates.grid_spacing;
    doc["config"] = config_json(cfg);
    return doc;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    const Trajectory<double> traj = compute_simulation(cfg);
    CommandResult res;
    if (cfg.format != "json") {
        io::write_file(out_path(cfg, "trajectory.csv"),
                       render([&](std::ostream& os) { io::write_trajectory_csv(os, traj, cfg.plane); }));
        res.files.push_back("trajectory.csv");
    }
    if (cfg.format != "csv") {
        io::write_file(out_path(cfg, "trajectory.json"), dump_json(io::trajectory_json(traj, cfg.plane)));
        res.files.push_back("trajectory.json");
    }
    res.summary = "samples=" + std::to_string(traj.samples.size()) + " t_end=" + io::format_real(traj.samples.back().t);
    return res;
}

CommandResult cmd_section(const RunConfig& cfg) {
    const auto crossings = compute_section(cfg);
    io::write_file(out_path(cfg, "crossings.csv"),
                   render([&](std::ostream& os) { io::write_crossings_csv(os, crossings); }));
    CommandResult res;
    res.files.push_back("crossings.csv");
    res.summary = "crossings=" + std::to_string(crossings.size());
    return res;
}

CommandResult cmd_trap(const RunConfig& cfg) {
    const TrappingRun<double> run = compute_trap(cfg);
    io::write_file(out_path(cfg, "report.json"), dump_json(trap_report_json(cfg, run)));
    io::write_file(out_path(cfg, "clouds.csv"), render([&](std::ostream& os) { io::write_clouds_csv(os, run); }));
    CommandResult res;
    res.files = {"report.json", "clouds.csv"};
    res.ok = run.report.trapping();
    std::ostringstream s;
    s << "seeds=" << run.report.total_seeds;
    for (std::size_t j = 0; j < run.report.per_iteration.size(); ++j) {
        const auto& it = run.report.per_iteration[j];
        s << " iter" << j + 1 << "=" << it.inside << "/" << it.returned;
    }
    s << " trapping=" << (res.ok ? "true" : "false");
    res.summary = s.str();
    return res;
}

CommandResult cmd_gah_demo(const RunConfig& cfg) {
    CommandResult res;
    if (cfg.system == SystemKind::GahModel) {
        const GahModelDemo demo = compute_gah_model_demo(cfg);
        const nlohmann::json report = gah_model_report_json(cfg, demo);
        io::write_file(out_path(cfg, "model_clouds.csv"),
                       render([&](std::ostream& os) { io::write_model_clouds_csv(os, demo.grid, demo.iterates); }));
        io::write_file(out_path(cfg, "model_report.json"), dump_json(report));
        res.files = {"model_clouds.csv", "model_report.json"};
        res.ok = report["trapping"].get<bool>() && report["star"]["holds"].get<bool>();
        res.summary = "grid=" + std::to_string(demo.grid.size()) + " trapping=" + (report["trapping"].get<bool>() ? "true" : "false") +
                      " star=" + (report["star"]["holds"].get<bool>() ? "true" : "false");
        return res;
    }
    require(cfg.system == SystemKind::GahSystem, "gah-demo needs system gah_system or gah_model");
    const GahSystemDemo demo = compute_gah_system_demo(cfg);
    std::vector<Point2> images;
    for (const auto& im : demo.images) {
        if (im.image) images.push_back(*im.image);
    }
    const nlohmann::json report = gah_system_report_json(demo);
    io::write_file(out_path(cfg, "seeds.csv"), render([&](std::ostream& os) { io::write_points_csv(os, "r,z", demo.seeds); }));
    io::write_file(out_path(cfg, "image.csv"), render([&](std::ostream& os) { io::write_points_csv(os, "r,z", images); }));
    io::write_file(out_path(cfg, "gah_report.json"), dump_json(report));
    res.files = {"seeds.csv", "image.csv", "gah_report.json"};
    res.ok = report["contained"].get<bool>();
    res.summary = "seeds=" + std::to_string(demo.seeds.size()) + " mapped=" + std::to_string(images.size()) +
                  " contained=" + (res.ok ? "true" : "false");
    return res;
}

}  // namespace gah
