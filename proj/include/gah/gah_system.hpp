#pragma once

// Constructed ODE whose Poincare map on the square Q0 is a generalized
// attracting horseshoe. States are cylindrical (r, theta, z) with
// theta' = 1, so the flow time and the angle coincide. The first half-turn
// stretches r by 1.2 and squeezes z towards -0.2 by 1/5; the second
// half-turn rotates the (r - 0.66, z) half-plane about the fold circle.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gah/integrator.hpp"
#include "gah/parallel.hpp"

namespace gah {

template <typename Scalar>
using CylState = Vec3<Scalar>;  // (r, theta, z)

namespace gah_constants {
inline constexpr double fold_radius = 0.66;
inline constexpr double stretch = 1.2;
inline constexpr double squeeze = 0.2;
inline constexpr double squeeze_axis = -0.2;
inline constexpr double blend_start = 0.06;
inline constexpr double band_low = -0.26;
inline constexpr double band_high = -0.06;
/// Seam band on theta mod 2*pi and on r - 0.66.
inline constexpr double seam_tol = 1e-12;
/// Slack on the z band of the blended branch; stretched images land on its edges.
inline constexpr double band_tol = 1e-6;
}  // namespace gah_constants

template <typename Scalar>
Scalar sigma(Scalar theta) {
    const Scalar s = std::sin(theta);
    return Scalar(2) * s * s;
}

/// Blending profile on r <= 0.66: 0 up to 0.06, then sin^2(pi (r - 0.06) / 1.2).
template <typename Scalar>
Scalar xi(Scalar r) {
    if (r <= Scalar(gah_constants::blend_start)) return Scalar(0);
    const Scalar rr = std::min(r, Scalar(gah_constants::fold_radius));
    const Scalar s = std::sin(std::numbers::pi_v<Scalar> * (rr - Scalar(gah_constants::blend_start)) / Scalar(1.2));
    return s * s;
}

/// The same profile in the shifted coordinate r~ = r - 0.66.
template <typename Scalar>
Scalar psi(Scalar r_tilde) {
    return xi(r_tilde + Scalar(gah_constants::fold_radius));
}

template <typename Scalar>
struct FoldCoords {
    Scalar r_tilde{};
    Scalar z{};
    Scalar rho{};
    Scalar phi{};
    Scalar center_c = Scalar(gah_constants::fold_radius);
};

template <typename Scalar>
FoldCoords<Scalar> fold_coords(const CylState<Scalar>& s) {
    FoldCoords<Scalar> f;
    f.r_tilde = s[0] - Scalar(gah_constants::fold_radius);
    f.z = s[2];
    f.rho = std::hypot(f.r_tilde, f.z);
    f.phi = std::atan2(f.z, f.r_tilde);
    return f;
}

/// Q0 = {0.05 <= r <= 1.05, theta = 0, -0.5 <= z <= 0.5}.
struct TransversalSquare {
    double r_min = 0.05;
    double r_max = 1.05;
    double z_min = -0.5;
    double z_max = 0.5;
    double theta = 0.0;

    bool contains(double r, double z, double tol = 0.0) const {
        return r >= r_min - tol && r <= r_max + tol && z >= z_min - tol && z <= z_max + tol;
    }
    /// Distance to the nearest edge, positive inside.
    double margin(double r, double z) const {
        return std::min({r - r_min, r_max - r, z - z_min, z_max - z});
    }
    /// Image of the square after the stretch/squeeze half-turn (in r, z; x = -r at theta = pi).
    TransversalSquare half_turn_image() const {
        const double s = gah_constants::squeeze, a = gah_constants::squeeze_axis;
        return {r_min * gah_constants::stretch, r_max * gah_constants::stretch, a + s * (z_min - a), a + s * (z_max - a),
                std::numbers::pi};
    }
};

template <typename Scalar>
CylState<Scalar> stretch_squeeze_field(const CylState<Scalar>& s) {
    const Scalar sg = sigma(s[1]);
    const Scalar pi = std::numbers::pi_v<Scalar>;
    return CylState<Scalar>(std::log(Scalar(gah_constants::stretch)) / pi * sg * s[0], Scalar(1),
                            std::log(Scalar(gah_constants::squeeze)) / pi * sg * (s[2] - Scalar(gah_constants::squeeze_axis)));
}

/// Exact solution of the stretch/squeeze field from s0 (at angle s0[1]) to `theta`, both in [0, pi].
template <typename Scalar>
CylState<Scalar> stretch_squeeze_closed_form(const CylState<Scalar>& s0, Scalar theta) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    require(theta >= s0[1] && theta <= pi + Scalar(gah_constants::seam_tol) && s0[1] >= -Scalar(gah_constants::seam_tol),
            "closed form is valid for 0 <= theta0 <= theta <= pi");
    auto phase = [](Scalar t) { return Scalar(2) * t - std::sin(Scalar(2) * t); };
    const Scalar w = (phase(theta) - phase(s0[1])) / (Scalar(2) * pi);
    const Scalar a = Scalar(gah_constants::squeeze_axis);
    return CylState<Scalar>(s0[0] * std::exp(std::log(Scalar(gah_constants::stretch)) * w), theta,
                            a + (s0[2] - a) * std::exp(std::log(Scalar(gah_constants::squeeze)) * w));
}

template <typename Scalar>
CylState<Scalar> fold_field(const CylState<Scalar>& s) {
    const Scalar sg = sigma(s[1]);
    return CylState<Scalar>(-sg * s[2], Scalar(1), sg * (s[0] - Scalar(gah_constants::fold_radius)));
}

/// Rotation angle accumulated by the fold field since t = pi: (t - pi) - sin t cos t.
template <typename Scalar>
Scalar fold_phase(Scalar t) {
    return (t - std::numbers::pi_v<Scalar>) - std::sin(t) * std::cos(t);
}

template <typename Scalar>
FoldCoords<Scalar> fold_closed_form(Scalar rho0, Scalar phi0, Scalar t) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    require(rho0 >= 0, "rho0 must be >= 0");
    require(t >= pi - Scalar(gah_constants::seam_tol) && t <= Scalar(2) * pi + Scalar(gah_constants::seam_tol),
            "fold closed form is valid for pi <= t <= 2*pi");
    FoldCoords<Scalar> f;
    f.rho = rho0;
    f.phi = fold_phase(t) + phi0;
    f.r_tilde = rho0 * std::cos(f.phi);
    f.z = rho0 * std::sin(f.phi);
    return f;
}

enum class GahBranch { StretchSqueeze, Fold, Blended, Rest };

/// Branch of the piecewise field at s (theta reduced mod 2*pi).
template <typename Scalar>
GahBranch gah_branch(const CylState<Scalar>& s) {
    using namespace gah_constants;
    if (!all_finite(s)) throw Error(ErrorKind::AmbiguousBranch, "cannot select a branch for a non-finite state");
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    Scalar th = std::fmod(s[1], two_pi);
    if (th < 0) th += two_pi;
    if (th <= std::numbers::pi_v<Scalar> + Scalar(seam_tol) || th >= two_pi - Scalar(seam_tol)) {
        return GahBranch::StretchSqueeze;
    }
    if (s[0] >= Scalar(fold_radius) - Scalar(seam_tol) || s[2] >= 0) return GahBranch::Fold;
    if (s[2] >= Scalar(band_low) - Scalar(band_tol) && s[2] <= Scalar(band_high) + Scalar(band_tol)) {
        return GahBranch::Blended;
    }
    return GahBranch::Rest;
}

template <typename Scalar>
CylState<Scalar> gah_field(const CylState<Scalar>& s) {
    switch (gah_branch(s)) {
        case GahBranch::StretchSqueeze: return stretch_squeeze_field(s);
        case GahBranch::Fold: return fold_field(s);
        case GahBranch::Blended: return CylState<Scalar>(-xi(s[0]) * sigma(s[1]) * s[2], Scalar(1), Scalar(0));
        case GahBranch::Rest: break;
    }
    return CylState<Scalar>(Scalar(0), Scalar(1), Scalar(0));
}

template <typename Scalar>
struct GahField {
    CylState<Scalar> operator()(const CylState<Scalar>& s) const { return gah_field(s); }
};

/// Tolerances used for the Q0 return map; max_step keeps seam crossings well resolved.
template <typename Scalar = double>
IntegratorConfig<Scalar> gah_integrator_defaults() {
    IntegratorConfig<Scalar> cfg;
    cfg.rel_tol = Scalar(1e-10);
    cfg.abs_tol = Scalar(1e-12);
    cfg.max_step = Scalar(0.05);
    return cfg;
}

/// Flows a cylindrical state from angle theta0 to theta1 under gah_field,
/// splitting the integration at every multiple of pi.
template <typename Scalar>
CylState<Scalar> flow_gah(const CylState<Scalar>& s0, Scalar theta1, const IntegratorConfig<Scalar>& cfg) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    CylState<Scalar> s = s0;
    while (s[1] < theta1 - Scalar(gah_constants::seam_tol)) {
        const Scalar next = std::min(theta1, (std::floor(s[1] / pi + Scalar(gah_constants::seam_tol)) + 1) * pi);
        IntegratorConfig<Scalar> seg = cfg;
        seg.t_span = {s[1], next};
        seg.initial_state = s;
        DormandPrince<Scalar, GahField<Scalar>> stepper(GahField<Scalar>{}, seg);
        while (!stepper.done()) stepper.step();
        s = stepper.state();
        s[1] = next;
    }
    return s;
}

template <typename Scalar>
struct GahImage {
    Vec2<Scalar> seed = Vec2<Scalar>::Zero();  // (r, z)
    std::optional<Vec2<Scalar>> image;         // (r, z) after one full turn
    std::string error;
};

/// Full-turn return map of (r, z) seeds in Q0; per-seed failures are recorded.
template <typename Scalar>
std::vector<GahImage<Scalar>> gah_poincare_image(const std::vector<Vec2<Scalar>>& seeds,
                                                 const IntegratorConfig<Scalar>& cfg = gah_integrator_defaults<Scalar>(),
                                                 const TransversalSquare& q0 = {}) {
    for (const auto& s : seeds) {
        require(q0.contains(double(s.x()), double(s.y()), 1e-12), "seed lies outside Q0");
    }
    std::vector<GahImage<Scalar>> out(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
        out[i].seed = seeds[i];
        try {
            const CylState<Scalar> end =
                flow_gah(CylState<Scalar>(seeds[i].x(), Scalar(0), seeds[i].y()), Scalar(2) * std::numbers::pi_v<Scalar>, cfg);
            out[i].image = Vec2<Scalar>(end[0], end[2]);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Timeout) throw;
            out[i].error = e.what();
        }
    });
    return out;
}

template <typename Scalar = double>
std::vector<Vec2<Scalar>> q0_grid(std::size_t n, const TransversalSquare& q0 = {}) {
    require(n >= 2, "grid needs at least 2 points per side");
    std::vector<Vec2<Scalar>> out;
    out.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const Scalar r = q0.r_min + (q0.r_max - q0.r_min) * Scalar(i) / Scalar(n - 1);
            const Scalar z = q0.z_min + (q0.z_max - q0.z_min) * Scalar(j) / Scalar(n - 1);
            out.emplace_back(r, z);
        }
    }
    return out;
}

}  // namespace gah
