// Acceptance checks A1..A9; prints one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "gah/commands.hpp"
#include "gah/gah_model.hpp"
#include "gah/gah_system.hpp"
#include "gah/io.hpp"
#include "gah/section.hpp"
#include "gah/trapping.hpp"

using namespace gah;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

TrappingRun<double> figure_run(std::size_t points_per_edge, std::size_t iterations) {
    TrappingOptions<double> opts;
    opts.points_per_edge = points_per_edge;
    opts.iterations = iterations;
    return verify_trapping(rossler_figure_quadrilateral(), rossler_figure_plane(), Rossler<double>{},
                           IntegratorConfig<double>{}, opts);
}

Outcome first_return_contained(std::size_t points_per_edge) {
    const auto start = std::chrono::steady_clock::now();
    const auto run = figure_run(points_per_edge, 1);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& it = run.report.per_iteration.at(0);
    const bool pass = it.inside == it.returned && it.min_margin && *it.min_margin > 0 &&
                      double(it.no_return) <= 0.005 * double(run.report.total_seeds);
    return {pass, "seeds=" + std::to_string(run.report.total_seeds) + " inside=" + std::to_string(it.inside) +
                      " returned=" + std::to_string(it.returned) + " no_return=" + std::to_string(it.no_return) +
                      " min_margin=" + num(it.min_margin.value_or(NAN)) + " time=" + num(seconds) + "s"};
}

Outcome a1() {
    const Outcome full = first_return_contained(1000);
    const Outcome ci = first_return_contained(100);
    return {full.pass && ci.pass, "1000/edge: " + full.detail + "; 100/edge: " + ci.detail};
}

Outcome a2() {
    const auto run = figure_run(1000, 5);
    bool all_inside = run.report.trapping();
    for (const auto& it : run.report.per_iteration) all_inside = all_inside && it.inside == run.report.total_seeds;
    const NestingCheck nest = check_nesting(run);
    std::string margins;
    for (double m : nest.min_margin) margins += (margins.empty() ? "" : ",") + num(m);
    return {all_inside && nest.nested,
            std::string("all_inside=") + (all_inside ? "true" : "false") + " nesting_margins=[" + margins +
                "] slack=" + num(nest.slack)};
}

Outcome a3() {
    std::mt19937 rng(2024);
    const TransversalSquare q0;
    std::uniform_real_distribution<double> ur(q0.r_min, q0.r_max), uz(q0.z_min, q0.z_max);
    auto field = [](const CylState<double>& s) { return stretch_squeeze_field(s); };
    double worst_path = 0, worst_factor = 0;
    for (int i = 0; i < 100; ++i) {
        const CylState<double> s0(ur(rng), 0, uz(rng));
        IntegratorConfig<double> cfg;
        cfg.rel_tol = cfg.abs_tol = 1e-11;
        cfg.t_span = {0, pi};
        cfg.initial_state = s0;
        const auto traj = integrate(field, cfg);
        for (const auto& smp : traj.samples) {
            if (smp.t <= 0) continue;
            worst_path = std::max(worst_path, (smp.state - stretch_squeeze_closed_form(s0, smp.t)).cwiseAbs().maxCoeff());
        }
        const auto& end = traj.samples.back().state;
        worst_factor = std::max(worst_factor, std::abs(end[0] - 1.2 * s0[0]));
        worst_factor = std::max(worst_factor, std::abs((end[2] + 0.2) - 0.2 * (s0[2] + 0.2)));
    }
    return {worst_path < 1e-6 && worst_factor < 1e-6,
            "max_closed_form_error=" + num(worst_path) + " max_endpoint_factor_error=" + num(worst_factor)};
}

Outcome a4() {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> urho(0.01, 0.6), uphi(-pi, pi);
    auto field = [](const CylState<double>& s) { return fold_field(s); };
    double worst_drift = 0, worst_turn = 0;
    for (int i = 0; i < 50; ++i) {
        const double rho = urho(rng), phi0 = uphi(rng);
        IntegratorConfig<double> cfg;
        cfg.rel_tol = cfg.abs_tol = 1e-13;
        cfg.t_span = {pi, 2 * pi};
        cfg.initial_state = CylState<double>(gah_constants::fold_radius + rho * std::cos(phi0), pi, rho * std::sin(phi0));
        const auto traj = integrate(field, cfg);
        for (const auto& smp : traj.samples) {
            worst_drift = std::max(worst_drift, std::abs(fold_coords(smp.state).rho - rho) / rho);
        }
        const double turned = fold_coords(traj.samples.back().state).phi - phi0;
        worst_turn = std::max(worst_turn, std::abs(std::remainder(turned - pi, 2 * pi)));
    }
    return {worst_drift < 1e-8 && worst_turn < 1e-10,
            "max_rho_drift=" + num(worst_drift) + " max_phi_error=" + num(worst_turn)};
}

Outcome a5() {
    const auto images = gah_poincare_image(q0_grid<double>(20));
    const TransversalSquare q0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::size_t failures = 0;
    for (const auto& im : images) {
        if (!im.image) {
            ++failures;
            continue;
        }
        min_margin = std::min(min_margin, q0.margin(im.image->x(), im.image->y()));
    }
    return {failures == 0 && min_margin > 0,
            "seeds=" + std::to_string(images.size()) + " failures=" + std::to_string(failures) + " min_margin=" + num(min_margin)};
}

Outcome a6() {
    // Exact samples of x = sin t; crossing of x = 0.5 at pi/6 sits 30% into a bracket.
    const SectionPlane<double> plane{0.0, Axis::Z, 0, 0.5, Direction::Both};
    const double t_root = pi / 6;
    const double hs[] = {0.1, 0.05, 0.025};
    double err[3];
    for (int i = 0; i < 3; ++i) {
        Trajectory<double> traj;
        const double t0 = t_root - 0.3 * hs[i] - 3 * hs[i];
        for (int k = 0; k <= 7; ++k) {
            const double t = t0 + k * hs[i];
            traj.samples.push_back({t, State3(std::sin(t), std::cos(t), 0)});
        }
        const auto cs = find_crossings(traj, plane, Refine::Linear);
        err[i] = cs.size() == 1 ? std::abs(cs[0].t - t_root) : NAN;
    }
    const double order = std::log(err[0] / err[2]) / std::log(hs[0] / hs[2]);

    IntegratorConfig<double> cfg;
    cfg.t_span = {0, 20};
    cfg.max_step = 0.1;
    const auto traj = integrate([](const State3& s) { return State3(s.y(), -s.x(), 0); }, cfg);
    double worst = 0;
    const auto dense = find_crossings(traj, plane, Refine::DenseBisection);
    for (const auto& c : dense) worst = std::max(worst, c.residual);
    return {order >= 1.9 && !dense.empty() && worst < 1e-10,
            "observed_order=" + num(order) + " dense_crossings=" + std::to_string(dense.size()) + " max_residual=" + num(worst)};
}

Outcome a7() {
    const GahModelParams<double> params;
    const RectRegion<double> q;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const auto& p : rect_grid(q, 200)) min_margin = std::min(min_margin, q.margin(gah_apply(p, params, q)));

    const auto map = [&](const Point2& u) { return gah_apply(u, params, q); };
    const auto fp = find_fixed_point(map, Point2(0.45, 0.45));
    const double ev0 = std::abs(fp.eigenvalues[0]), ev1 = std::abs(fp.eigenvalues[1]);
    const bool eigen_ok = fp.kind == FixedPointKind::Saddle && std::abs(ev0 - 1.5) < 1e-6 && std::abs(ev1 - 0.3) < 1e-6;

    const bool star = check_star(params, q).holds;

    // f^(n+1)(G) = f^n(f(G)): points of the next cloud lie within L^n h / sqrt(2) of the previous one.
    const std::size_t res = 120;
    const auto it = iterate_region(params, q, 5, res);
    const auto grid = rect_grid(q, res);
    double lipschitz = 0;
    for (std::size_t i = 0; i + 1 < res; ++i) {
        for (std::size_t j = 0; j + 1 < res; ++j) {
            const Point2& a = grid[i * res + j];
            for (const Point2& b : {grid[(i + 1) * res + j], grid[i * res + j + 1]}) {
                lipschitz = std::max(lipschitz, (map(a) - map(b)).norm() / (a - b).norm());
            }
        }
    }
    bool nested = true;
    double bound = it.grid_spacing / std::sqrt(2.0), worst_ratio = 0;
    for (std::size_t n = 0; n + 1 < it.clouds.size(); ++n) {
        bound *= lipschitz;
        double worst = 0;
        for (const auto& p : it.clouds[n + 1]) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : it.clouds[n]) best = std::min(best, (p - c).squaredNorm());
            worst = std::max(worst, std::sqrt(best));
        }
        worst_ratio = std::max(worst_ratio, worst / bound);
        nested = nested && worst <= bound;
    }
    return {min_margin > 0 && eigen_ok && star && nested,
            "image_min_margin=" + num(min_margin) + " fixed_point=(" + num(fp.point.x()) + "," + num(fp.point.y()) +
                ") |eigenvalues|=" + num(ev0) + "," + num(ev1) + " star=" + (star ? "true" : "false") +
                " nesting_distance/bound=" + num(worst_ratio)};
}

Outcome a8() {
    const auto linear = [](const Point2& u) { return Point2(2 * u.x(), 0.3 * u.y()); };
    const Point2 start = Point2(0.1, 0.0);
    const auto lin = find_fixed_point(linear, start);
    const bool lin_ok = lin.iterations <= 3 && lin.residual < 1e-10;

    // The two-sided map alternates direction, so the one-sided descending map is used.
    auto plane = rossler_figure_plane();
    plane.direction = Direction::Descending;
    IntegratorConfig<double> cfg;
    cfg.rel_tol = cfg.abs_tol = 1e-12;
    cfg.t_span = {0, 5000};
    const auto orbit = integrate(Rossler<double>{}, cfg);
    const auto cs = find_crossings(orbit, plane, Refine::DenseBisection);
    double closest = std::numeric_limits<double>::infinity();
    Point2 guess = Point2::Zero();
    for (std::size_t i = 0; i + 1 < cs.size(); ++i) {
        if (cs[i].t < 100) continue;
        const double d = (plane.planar(cs[i + 1].point) - plane.planar(cs[i].point)).norm();
        if (d < closest) {
            closest = d;
            guess = plane.planar(cs[i].point);
        }
    }
    IntegratorConfig<double> map_cfg;
    map_cfg.rel_tol = map_cfg.abs_tol = 1e-12;
    map_cfg.t_span = {0, 100};
    const auto map = planar_return_map(plane, Rossler<double>{}, map_cfg);
    const auto fp = find_fixed_point(map, guess);
    const double residual = (map(fp.point) - fp.point).norm();
    const double ev0 = std::abs(fp.eigenvalues[0]), ev1 = std::abs(fp.eigenvalues[1]);
    const bool ross_ok = residual < 1e-7 && ev0 > 1 && ev1 < 1;
    return {lin_ok && ross_ok,
            "linear: iterations=" + std::to_string(lin.iterations) + " residual=" + num(lin.residual) +
                "; rossler: point=(" + num(fp.point.x()) + "," + num(fp.point.y()) + ") residual=" + num(residual) +
                " |eigenvalues|=" + num(ev0) + "," + num(ev1)};
}

Outcome a9() {
    const fs::path dir = fs::temp_directory_path() / ("gah_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cmd = "cd '" + dir.string() + "' && '" GAHTOOL_PATH "' trap --preset fig3 --out-dir out > /dev/null";
    const std::vector<std::string> files = {"report.json", "clouds.csv"};
    std::vector<std::string> first;
    bool ran = std::system(cmd.c_str()) == 0;
    for (const auto& f : files) first.push_back(ran ? io::read_file(dir / "out" / f) : "");
    fs::remove_all(dir / "out");
    ran = ran && std::system(cmd.c_str()) == 0;
    bool same = ran;
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < files.size() && ran; ++i) {
        const std::string second = io::read_file(dir / "out" / files[i]);
        same = same && second == first[i] && !second.empty();
        bytes += second.size();
    }
    fs::remove_all(dir);
    return {same, std::string("runs_succeeded=") + (ran ? "true" : "false") + " identical=" + (same ? "true" : "false") +
                      " bytes=" + std::to_string(bytes)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}};
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
