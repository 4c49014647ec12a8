#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gah/integrator.hpp"

namespace gah {

enum class Direction { Ascending, Descending, Both };
enum class Refine { Linear, DenseBisection };

inline const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Ascending: return "ascending";
        case Direction::Descending: return "descending";
        case Direction::Both: return "both";
    }
    return "both";
}

inline Direction parse_direction(const std::string& s) {
    if (s == "ascending" || s == "asc") return Direction::Ascending;
    if (s == "descending" || s == "desc") return Direction::Descending;
    if (s == "both") return Direction::Both;
    throw Error(ErrorKind::InvalidArgument, "unknown direction '" + s + "'");
}

/// A planar section: the flow is viewed in a frame rotated by `rotation_angle`
/// about `rotation_axis`, and the section is {rotated[cut_coord] == cut_value}.
/// Rotating the section by +angle is the same as rotating the flow by -angle,
/// so rotated = R(-angle) * world.
template <typename Scalar>
struct SectionPlane {
    Scalar rotation_angle = Scalar(0);
    Axis rotation_axis = Axis::Z;
    int cut_coord = 2;  // 0-based
    Scalar cut_value = Scalar(0);
    Direction direction = Direction::Both;

    void validate() const {
        require(std::isfinite(rotation_angle), "plane angle must be finite");
        require(std::isfinite(cut_value), "plane cut value must be finite");
        require(cut_coord >= 0 && cut_coord <= 2, "plane cut coordinate must be 1, 2 or 3");
    }

    Vec3<Scalar> to_plane_frame(const Vec3<Scalar>& world) const {
        return rotate_frame(world, -rotation_angle, rotation_axis);
    }
    Vec3<Scalar> to_world(const Vec3<Scalar>& rotated) const {
        return rotate_frame(rotated, rotation_angle, rotation_axis);
    }

    /// Signed distance-like offset (rotated cut coordinate minus cut value) of a world state.
    Scalar offset(const Vec3<Scalar>& world) const { return to_plane_frame(world)[cut_coord] - cut_value; }

    std::pair<int, int> planar_indices() const {
        switch (cut_coord) {
            case 0: return {1, 2};
            case 1: return {0, 2};
            default: return {0, 1};
        }
    }

    Vec2<Scalar> planar(const Vec3<Scalar>& rotated) const {
        const auto [i, j] = planar_indices();
        return Vec2<Scalar>(rotated[i], rotated[j]);
    }

    /// Planar coordinates -> rotated-frame point on the plane.
    Vec3<Scalar> lift(const Vec2<Scalar>& u) const {
        const auto [i, j] = planar_indices();
        Vec3<Scalar> out;
        out[i] = u.x();
        out[j] = u.y();
        out[cut_coord] = cut_value;
        return out;
    }
};

/// Plane of the Rossler trapping-region experiment: 2*pi/5 about z, cut on the third rotated coordinate at 5.
template <typename Scalar = double>
SectionPlane<Scalar> rossler_figure_plane() {
    return {Scalar(2) * std::numbers::pi_v<Scalar> / Scalar(5), Axis::Z, 2, Scalar(5), Direction::Both};
}

template <typename Scalar>
struct Crossing {
    Scalar t{};
    Vec3<Scalar> point = Vec3<Scalar>::Zero();  // rotated frame
    std::size_t before = 0;
    std::size_t after = 0;
    Direction direction = Direction::Ascending;
    /// |cut coordinate - cut value| of the trajectory at `t` (dense output when available).
    Scalar residual{};
};

namespace detail {

template <typename Scalar>
std::optional<Direction> crossing_kind(Scalar c0, Scalar c1) {
    if (c0 < 0 && c1 >= 0) return Direction::Ascending;
    if (c0 > 0 && c1 <= 0) return Direction::Descending;
    return std::nullopt;
}

inline bool accepts(Direction filter, Direction d) { return filter == Direction::Both || filter == d; }

/// Bisection for the root of the plane offset along one dense step.
template <typename Scalar>
std::pair<Scalar, Vec3<Scalar>> bisect_on_step(const DenseStep<Scalar>& step, const SectionPlane<Scalar>& plane,
                                               Scalar ta, Scalar tb, Scalar ca, Scalar cb) {
    if (cb == 0) return {tb, step(tb)};
    Scalar lo = ta, hi = tb;
    Scalar c_lo = ca;
    Scalar t_mid = tb;
    Vec3<Scalar> y_mid = step(tb);
    for (int it = 0; it < 200; ++it) {
        t_mid = lo + (hi - lo) / 2;
        y_mid = step(t_mid);
        const Scalar c_mid = plane.offset(y_mid);
        if (std::abs(c_mid) < Scalar(1e-13) || hi - lo <= Scalar(4) * std::numeric_limits<Scalar>::epsilon() * std::abs(t_mid)) {
            break;
        }
        if ((c_mid < 0) == (c_lo < 0)) {
            lo = t_mid;
            c_lo = c_mid;
        } else {
            hi = t_mid;
        }
    }
    return {t_mid, y_mid};
}

}  // namespace detail

/// Every sign change of the plane offset between consecutive samples yields one crossing.
template <typename Scalar>
std::vector<Crossing<Scalar>> find_crossings(const Trajectory<Scalar>& traj, const SectionPlane<Scalar>& plane,
                                             Refine refine = Refine::Linear) {
    plane.validate();
    require(!traj.samples.empty(), "trajectory is empty", ErrorKind::EmptyTrajectory);
    if (refine == Refine::DenseBisection) {
        require(traj.has_dense(), "dense refinement needs a trajectory with dense output", ErrorKind::MissingDenseOutput);
    }
    std::vector<Crossing<Scalar>> out;
    Vec3<Scalar> prev = plane.to_plane_frame(traj.samples[0].state);
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        const Vec3<Scalar> cur = plane.to_plane_frame(traj.samples[i + 1].state);
        const Scalar c0 = prev[plane.cut_coord] - plane.cut_value;
        const Scalar c1 = cur[plane.cut_coord] - plane.cut_value;
        const auto kind = detail::crossing_kind(c0, c1);
        if (kind && detail::accepts(plane.direction, *kind)) {
            Crossing<Scalar> c;
            c.before = i;
            c.after = i + 1;
            c.direction = *kind;
            const Scalar t0 = traj.samples[i].t, t1 = traj.samples[i + 1].t;
            if (refine == Refine::Linear) {
                const Scalar frac = c0 / (c0 - c1);
                c.t = t0 + frac * (t1 - t0);
                c.point = prev + frac * (cur - prev);
                c.residual = traj.has_dense() ? std::abs(plane.offset(traj.steps[i](c.t)))
                                              : std::abs(c.point[plane.cut_coord] - plane.cut_value);
            } else {
                const auto [t, y] = detail::bisect_on_step(traj.steps[i], plane, t0, t1, c0, c1);
                c.t = t;
                c.point = plane.to_plane_frame(y);
                c.residual = std::abs(c.point[plane.cut_coord] - plane.cut_value);
            }
            out.push_back(c);
        }
        prev = cur;
    }
    return out;
}

template <typename Scalar>
struct ReturnMapResult {
    Vec3<Scalar> seed = Vec3<Scalar>::Zero();   // rotated frame, on the plane
    Vec3<Scalar> image = Vec3<Scalar>::Zero();  // rotated frame, on the plane
    Scalar flight_time{};
    Direction direction = Direction::Ascending;
};

template <typename Scalar>
struct ReturnOptions {
    /// Returns before this flight time are ignored. Non-positive selects 10 * max_step.
    Scalar t_min = Scalar(0);
    Refine refine = Refine::DenseBisection;
    /// Seeds farther than this from the plane are rejected.
    Scalar on_plane_tol = Scalar(1e-9);

    Scalar effective_t_min(const IntegratorConfig<Scalar>& cfg) const {
        return t_min > 0 ? t_min : Scalar(10) * cfg.max_step;
    }
};

/// Integrates from a rotated-frame seed on the plane until the first accepted crossing.
template <typename Scalar, typename Field>
    requires VectorField<Field, Scalar>
ReturnMapResult<Scalar> first_return(const Vec3<Scalar>& seed, const SectionPlane<Scalar>& plane, const Field& field,
                                     const IntegratorConfig<Scalar>& cfg, const ReturnOptions<Scalar>& opts = {}) {
    plane.validate();
    require(all_finite(seed), "seed must be finite", ErrorKind::NonFiniteState);
    require(std::abs(seed[plane.cut_coord] - plane.cut_value) <= opts.on_plane_tol, "seed does not lie on the plane");

    Vec3<Scalar> on_plane = seed;
    on_plane[plane.cut_coord] = plane.cut_value;

    IntegratorConfig<Scalar> run = cfg;
    run.initial_state = plane.to_world(on_plane);
    const Scalar t_start = run.t_span.first;
    const Scalar t_min = opts.effective_t_min(cfg);

    DormandPrince<Scalar, const Field&> stepper(field, run);
    Vec3<Scalar> prev = plane.to_plane_frame(stepper.state());
    Scalar t_prev = stepper.time();
    while (!stepper.done()) {
        const DenseStep<Scalar>& step = stepper.step();
        const Vec3<Scalar> cur = plane.to_plane_frame(stepper.state());
        const Scalar c0 = prev[plane.cut_coord] - plane.cut_value;
        const Scalar c1 = cur[plane.cut_coord] - plane.cut_value;
        const auto kind = detail::crossing_kind(c0, c1);
        if (kind && detail::accepts(plane.direction, *kind)) {
            Scalar t_hit;
            Vec3<Scalar> hit;
            if (opts.refine == Refine::Linear) {
                const Scalar frac = c0 / (c0 - c1);
                t_hit = t_prev + frac * (stepper.time() - t_prev);
                hit = prev + frac * (cur - prev);
            } else {
                const auto [t, y] = detail::bisect_on_step(step, plane, t_prev, stepper.time(), c0, c1);
                t_hit = t;
                hit = plane.to_plane_frame(y);
            }
            if (t_hit - t_start > t_min) {
                return {on_plane, hit, t_hit - t_start, *kind};
            }
        }
        prev = cur;
        t_prev = stepper.time();
    }
    throw Error(ErrorKind::NoReturn, "no return to the section within t_span");
}

template <typename Scalar>
struct MapOrbit {
    std::vector<ReturnMapResult<Scalar>> results;
    /// Index of the iteration that failed (0-based), if any.
    std::optional<std::size_t> failed_at;
    std::optional<ErrorKind> failure;
    std::string message;

    bool complete(std::size_t k) const { return results.size() == k; }
};

/// Chains first_return k times; stops early on failure and keeps the partial orbit.
template <typename Scalar, typename Field>
    requires VectorField<Field, Scalar>
MapOrbit<Scalar> iterate_map(const Vec3<Scalar>& seed, const SectionPlane<Scalar>& plane, const Field& field,
                             const IntegratorConfig<Scalar>& cfg, std::size_t k, const ReturnOptions<Scalar>& opts = {}) {
    require(k >= 1, "iteration count must be >= 1");
    MapOrbit<Scalar> orbit;
    orbit.results.reserve(k);
    Vec3<Scalar> current = seed;
    for (std::size_t i = 0; i < k; ++i) {
        try {
            orbit.results.push_back(first_return(current, plane, field, cfg, opts));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Timeout || e.kind() == ErrorKind::InvalidArgument) throw;
            orbit.failed_at = i;
            orbit.failure = e.kind();
            orbit.message = e.what();
            break;
        }
        current = orbit.results.back().image;
    }
    return orbit;
}

enum class FixedPointKind { Saddle, Sink, Source, NonHyperbolic };

inline const char* fixed_point_kind_name(FixedPointKind k) {
    switch (k) {
        case FixedPointKind::Saddle: return "saddle";
        case FixedPointKind::Sink: return "sink";
        case FixedPointKind::Source: return "source";
        case FixedPointKind::NonHyperbolic: return "non-hyperbolic";
    }
    return "non-hyperbolic";
}

template <typename Scalar>
struct FixedPointOptions {
    Scalar tol = Scalar(1e-9);
    int max_iterations = 50;
    /// Central-difference step relative to max(1, |u|).
    Scalar fd_step = Scalar(1e-5);
};

template <typename Scalar>
struct FixedPoint {
    Vec2<Scalar> point = Vec2<Scalar>::Zero();
    Mat2<Scalar> jacobian = Mat2<Scalar>::Zero();
    /// Sorted by decreasing modulus.
    std::array<std::complex<Scalar>, 2> eigenvalues{};
    FixedPointKind kind = FixedPointKind::NonHyperbolic;
    int iterations = 0;
    Scalar residual{};
    std::vector<Scalar> residual_history;
};

template <typename Scalar, typename Map>
Mat2<Scalar> finite_difference_jacobian(const Map& map, const Vec2<Scalar>& u, Scalar rel_step) {
    const Scalar h = rel_step * std::max(Scalar(1), u.norm());
    Mat2<Scalar> j;
    for (int c = 0; c < 2; ++c) {
        Vec2<Scalar> e = Vec2<Scalar>::Zero();
        e[c] = h;
        j.col(c) = (map(Vec2<Scalar>(u + e)) - map(Vec2<Scalar>(u - e))) / (Scalar(2) * h);
    }
    return j;
}

template <typename Scalar>
FixedPointKind classify(const std::array<std::complex<Scalar>, 2>& ev) {
    const Scalar m1 = std::abs(ev[0]), m2 = std::abs(ev[1]);
    if (m1 > 1 && m2 < 1) return FixedPointKind::Saddle;
    if (m1 < 1 && m2 < 1) return FixedPointKind::Sink;
    if (m1 > 1 && m2 > 1) return FixedPointKind::Source;
    return FixedPointKind::NonHyperbolic;
}

template <typename Scalar>
std::array<std::complex<Scalar>, 2> eigenvalues_by_modulus(const Mat2<Scalar>& j) {
    Eigen::EigenSolver<Mat2<Scalar>> solver(j, false);
    std::array<std::complex<Scalar>, 2> ev{solver.eigenvalues()[0], solver.eigenvalues()[1]};
    if (std::abs(ev[0]) < std::abs(ev[1])) std::swap(ev[0], ev[1]);
    return ev;
}

/// Newton iteration on P(u) - u for a planar map P.
template <typename Scalar, typename Map>
FixedPoint<Scalar> find_fixed_point(const Map& map, const Vec2<Scalar>& guess, const FixedPointOptions<Scalar>& opts = {}) {
    require(all_finite(guess), "fixed-point guess must be finite");
    FixedPoint<Scalar> fp;
    Vec2<Scalar> u = guess;
    for (;;) {
        const Vec2<Scalar> r = map(u) - u;
        fp.residual = r.norm();
        fp.residual_history.push_back(fp.residual);
        if (fp.residual < opts.tol) break;
        if (fp.iterations >= opts.max_iterations) {
            throw Error(ErrorKind::NoConvergence, "Newton did not converge in " + std::to_string(opts.max_iterations) +
                                                      " iterations (residual " + std::to_string(double(fp.residual)) + ")");
        }
        const Mat2<Scalar> a = finite_difference_jacobian(map, u, opts.fd_step) - Mat2<Scalar>::Identity();
        const Scalar det = a.determinant();
        if (!std::isfinite(det) || std::abs(det) < Scalar(1e-14) * std::max(Scalar(1), a.squaredNorm())) {
            throw Error(ErrorKind::SingularJacobian, "DP(u) - I is singular");
        }
        u -= a.inverse() * r;
        ++fp.iterations;
    }
    fp.point = u;
    fp.jacobian = finite_difference_jacobian(map, u, opts.fd_step);
    fp.eigenvalues = eigenvalues_by_modulus(fp.jacobian);
    fp.kind = classify(fp.eigenvalues);
    return fp;
}

/// The in-plane return map u -> planar(first_return(lift(u))).
template <typename Scalar, typename Field>
    requires VectorField<Field, Scalar>
auto planar_return_map(const SectionPlane<Scalar>& plane, const Field& field, const IntegratorConfig<Scalar>& cfg,
                       const ReturnOptions<Scalar>& opts = {}) {
    return [plane, field, cfg, opts](const Vec2<Scalar>& u) -> Vec2<Scalar> {
        return plane.planar(first_return(plane.lift(u), plane, field, cfg, opts).image);
    };
}

}  // namespace gah
