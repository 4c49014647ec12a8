#pragma once

// A concrete planar generalized attracting horseshoe.
//
// The rectangle Q is contracted vertically by lambda_v (offset t_y) and
// expanded horizontally by lambda_h, giving a strip (u, v). The middle part of
// the strip is left straight. The part beyond the right fold line u = c_R.x is
// bent counter-clockwise around the arch centre c_R (above the strip) and runs
// back to the left as the upper leg; the part before the left fold line
// u = c_L.x is bent around c_L (below the strip) and runs right as the lower
// tail. Finally the whole picture is shifted horizontally by t_x.
//
// Every row at distance d from an arch centre turns through pi over the same
// strip length `arc_length`, with angle
//   alpha(s) = pi s / l + (1/d - pi/l) (l / 2 pi) sin(2 pi s / l),
// so the speed matches the straight legs at both ends of the arch and the map
// is C^1. alpha is monotone as long as d > l / (2 pi).
//
// On the straight leg the map is (x, y) -> (lambda_h x + t_x, lambda_v y + t_y)
// with saddle p = (t_x / (1 - lambda_h), t_y / (1 - lambda_v)).

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "gah/dynsys.hpp"
#include "gah/polygon.hpp"

namespace gah {

enum class Orientation { Preserving, Reversing };

template <typename Scalar>
struct RectRegion {
    Scalar x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
    /// Left edge of S (through the saddle p); S = [s_lo, x_hi].
    Scalar s_lo = Scalar(0.5);
    /// Keystone K = [k_lo, k_hi] x [y_lo, y_hi], inside S.
    Scalar k_lo = Scalar(0.8), k_hi = Scalar(1);

    Scalar width() const { return x_hi - x_lo; }
    Scalar height() const { return y_hi - y_lo; }
    Scalar area() const { return width() * height(); }

    bool contains(const Vec2<Scalar>& p, Scalar tol = Scalar(1e-12)) const {
        return p.x() >= x_lo - tol && p.x() <= x_hi + tol && p.y() >= y_lo - tol && p.y() <= y_hi + tol;
    }
    /// Distance to the nearest edge, positive inside.
    Scalar margin(const Vec2<Scalar>& p) const {
        return std::min({p.x() - x_lo, x_hi - p.x(), p.y() - y_lo, y_hi - p.y()});
    }

    void validate() const {
        require(x_lo < x_hi && y_lo < y_hi, "rectangle must have positive extent");
        require(x_lo <= s_lo && s_lo <= k_lo && k_lo < k_hi && k_hi <= x_hi, "regions must nest as K in S in Q");
    }
};

template <typename Scalar>
struct GahModelParams {
    Scalar lambda_v = Scalar(0.3);
    Scalar lambda_h = Scalar(1.5);
    /// Centre of the main (right) arch, in strip coordinates.
    Vec2<Scalar> fold_center{Scalar(0.91), Scalar(0.67)};
    /// Centre of the left tail arch, in strip coordinates.
    Vec2<Scalar> tail_center{Scalar(0.59), Scalar(0.33)};
    Scalar arc_length = Scalar(0.1);
    Vec2<Scalar> translate{Scalar(-0.25), Scalar(0.35)};
    Orientation orientation = Orientation::Preserving;

    void validate() const {
        require(lambda_v > 0 && lambda_v < Scalar(0.5), "lambda_v must lie in (0, 1/2)");
        require(lambda_h > 1 && lambda_h < 2, "lambda_h must lie in (1, 2)");
        require(arc_length > 0, "arc_length must be > 0");
        require(tail_center.x() < fold_center.x(), "tail arch must lie left of the main arch");
        require(all_finite(fold_center) && all_finite(tail_center) && all_finite(translate), "parameters must be finite");
    }

    /// Strip rows must stay strictly between the arch centres, far enough for a monotone turn.
    void validate_for(const RectRegion<Scalar>& q) const {
        validate();
        q.validate();
        const Scalar v_lo = lambda_v * q.y_lo + translate.y();
        const Scalar v_hi = lambda_v * q.y_hi + translate.y();
        const Scalar d_min = arc_length / (Scalar(2) * std::numbers::pi_v<Scalar>);
        require(fold_center.y() - v_hi > d_min, "main arch centre too close to the strip");
        require(v_lo - tail_center.y() > d_min, "tail arch centre too close to the strip");
    }
};

enum class ModelBranch { Straight, MainArch, UpperLeg, TailArch, LowerTail };

template <typename Scalar>
struct ModelImage {
    Vec2<Scalar> point = Vec2<Scalar>::Zero();
    ModelBranch branch = ModelBranch::Straight;
};

namespace detail {

template <typename Scalar>
Scalar arch_angle(Scalar s, Scalar d, Scalar ell) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return pi * s / ell + (Scalar(1) / d - pi / ell) * (ell / (Scalar(2) * pi)) * std::sin(Scalar(2) * pi * s / ell);
}

}  // namespace detail

/// Applies the horseshoe map and reports which piece of the image was used.
template <typename Scalar>
ModelImage<Scalar> gah_apply_tagged(const Vec2<Scalar>& p, const GahModelParams<Scalar>& params, const RectRegion<Scalar>& q) {
    if (!q.contains(p)) throw Error(ErrorKind::OutOfDomain, "point lies outside the trapping rectangle");
    const Scalar u = params.lambda_h * p.x();
    const Scalar v = params.lambda_v * p.y() + params.translate.y();
    const Scalar ell = params.arc_length;
    const Vec2<Scalar>& cr = params.fold_center;
    const Vec2<Scalar>& cl = params.tail_center;

    ModelImage<Scalar> out;
    if (u > cr.x()) {
        const Scalar s = u - cr.x();
        const Scalar d = cr.y() - v;
        if (s < ell) {
            const Scalar a = detail::arch_angle(s, d, ell);
            out = {{cr.x() + d * std::sin(a), cr.y() - d * std::cos(a)}, ModelBranch::MainArch};
        } else {
            out = {{cr.x() - (s - ell), cr.y() + d}, ModelBranch::UpperLeg};
        }
    } else if (u < cl.x()) {
        const Scalar s = cl.x() - u;
        const Scalar d = v - cl.y();
        if (s < ell) {
            const Scalar a = detail::arch_angle(s, d, ell);
            out = {{cl.x() - d * std::sin(a), cl.y() + d * std::cos(a)}, ModelBranch::TailArch};
        } else {
            out = {{cl.x() + (s - ell), cl.y() - d}, ModelBranch::LowerTail};
        }
    } else {
        out = {{u, v}, ModelBranch::Straight};
    }
    out.point.x() += params.translate.x();
    if (params.orientation == Orientation::Reversing) out.point.y() = q.y_lo + q.y_hi - out.point.y();
    return out;
}

template <typename Scalar>
Vec2<Scalar> gah_apply(const Vec2<Scalar>& p, const GahModelParams<Scalar>& params, const RectRegion<Scalar>& q) {
    return gah_apply_tagged(p, params, q).point;
}

/// Fixed point of the straight-leg affine branch; throws NoFixedPoint unless it lies in Q on that branch.
template <typename Scalar>
Vec2<Scalar> straight_leg_fixed_point(const GahModelParams<Scalar>& params, const RectRegion<Scalar>& q) {
    const Vec2<Scalar> p(params.translate.x() / (Scalar(1) - params.lambda_h),
                         params.translate.y() / (Scalar(1) - params.lambda_v));
    if (!q.contains(p, Scalar(0))) throw Error(ErrorKind::NoFixedPoint, "straight-leg fixed point lies outside Q");
    const Scalar u = params.lambda_h * p.x();
    if (u > params.fold_center.x() || u < params.tail_center.x()) {
        throw Error(ErrorKind::NoFixedPoint, "straight-leg fixed point is not on the straight leg");
    }
    return p;
}

inline Mat2<double> straight_leg_jacobian(const GahModelParams<double>& params) {
    return Eigen::Vector2d(params.lambda_h, params.lambda_v).asDiagonal();
}

template <typename Scalar>
struct StarCheck {
    bool holds = false;
    Vec2<Scalar> saddle = Vec2<Scalar>::Zero();
    /// Image of K with the largest x.
    Vec2<Scalar> witness = Vec2<Scalar>::Zero();
};

/// The keystone K must be mapped strictly to the left of the saddle p.
template <typename Scalar>
StarCheck<Scalar> check_star(const GahModelParams<Scalar>& params, const RectRegion<Scalar>& q, std::size_t grid = 200) {
    require(grid >= 2, "grid must have at least 2 points per side");
    StarCheck<Scalar> out;
    out.saddle = straight_leg_fixed_point(params, q);
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (std::size_t i = 0; i < grid; ++i) {
        const Scalar x = q.k_lo + (q.k_hi - q.k_lo) * Scalar(i) / Scalar(grid - 1);
        for (std::size_t j = 0; j < grid; ++j) {
            const Scalar y = q.y_lo + q.height() * Scalar(j) / Scalar(grid - 1);
            const Vec2<Scalar> img = gah_apply(Vec2<Scalar>(x, y), params, q);
            if (img.x() > best) {
                best = img.x();
                out.witness = img;
            }
        }
    }
    out.holds = best < out.saddle.x();
    return out;
}

template <typename Scalar = double>
std::vector<Vec2<Scalar>> rect_grid(const RectRegion<Scalar>& q, std::size_t n) {
    require(n >= 2, "grid must have at least 2 points per side");
    std::vector<Vec2<Scalar>> out;
    out.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out.emplace_back(q.x_lo + q.width() * Scalar(i) / Scalar(n - 1), q.y_lo + q.height() * Scalar(j) / Scalar(n - 1));
        }
    }
    return out;
}

template <typename Scalar>
struct RegionIterates {
    /// clouds[k] is f^(k+1) of the grid, in grid order.
    std::vector<std::vector<Vec2<Scalar>>> clouds;
    /// straight[k][i]: every iterate of grid point i up to k+1 used the straight leg.
    std::vector<std::vector<bool>> straight;
    Scalar grid_spacing{};
};

/// Pushes a resolution x resolution grid of Q forward n times.
template <typename Scalar>
RegionIterates<Scalar> iterate_region(const GahModelParams<Scalar>& params, const RectRegion<Scalar>& q, std::size_t n,
                                      std::size_t resolution) {
    require(n >= 1, "iteration count must be >= 1");
    params.validate_for(q);
    RegionIterates<Scalar> out;
    out.grid_spacing = std::max(q.width(), q.height()) / Scalar(resolution - 1);
    std::vector<Vec2<Scalar>> pts = rect_grid(q, resolution);
    std::vector<bool> straight(pts.size(), true);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const ModelImage<Scalar> img = gah_apply_tagged(pts[i], params, q);
            pts[i] = img.point;
            straight[i] = straight[i] && img.branch == ModelBranch::Straight;
        }
        out.clouds.push_back(pts);
        out.straight.push_back(straight);
    }
    return out;
}

}  // namespace gah
