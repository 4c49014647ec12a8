#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gah/gah_system.hpp"
#include "gah/integrator.hpp"

using namespace gah;

namespace {

constexpr double pi = std::numbers::pi;

using Cyl = CylState<double>;

// Exact image of a seed whose stretched radius is at least 0.66: the fold is a
// rigid half-turn about (0.66, 0) in the (r, z) plane.
Vec2<double> half_turn_image(double r0, double z0) {
    const Cyl mid = stretch_squeeze_closed_form(Cyl(r0, 0, z0), pi);
    return {2 * gah_constants::fold_radius - mid[0], -mid[2]};
}

template <typename Field>
Trajectory<double> integrate_from(Field field, const Cyl& s0, double t1, double tol = 1e-12) {
    IntegratorConfig<double> cfg;
    cfg.rel_tol = cfg.abs_tol = tol;
    cfg.max_step = 0.01;
    cfg.t_span = {s0[1], t1};
    cfg.initial_state = s0;
    return integrate(field, cfg);
}

}  // namespace

TEST_CASE("sigma and xi profile values") {
    CHECK(sigma(0.0) == 0.0);
    CHECK(sigma(pi / 2) == doctest::Approx(2.0));
    CHECK(std::abs(sigma(pi)) < 1e-30);
    CHECK(xi(0.0) == 0.0);
    CHECK(xi(0.06) == 0.0);
    CHECK(xi(0.36) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(xi(0.66) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(psi(-0.3) == doctest::Approx(0.5).epsilon(1e-14));
    // C^1 at the start of the blend: value and slope both vanish.
    const double h = 1e-7;
    CHECK(std::abs(xi(0.06 + h)) < 1e-12);
    CHECK(std::abs((xi(0.06 + h) - xi(0.06)) / h) < 1e-5);
}

TEST_CASE("stretch and squeeze field examples") {
    const Cyl f = stretch_squeeze_field(Cyl(1, pi / 2, 0.3));
    CHECK(f[0] == doctest::Approx(std::log(1.2) / pi * 2).epsilon(1e-14));
    CHECK(f[1] == 1.0);
    CHECK(f[2] == doctest::Approx(std::log(0.2) / pi * 2 * 0.5).epsilon(1e-14));
    // Every point on z = -0.2 stays on it.
    CHECK(stretch_squeeze_field(Cyl(0.7, 1.0, -0.2))[2] == 0.0);
}

TEST_CASE("stretch and squeeze over a half turn scale by 1.2 and 0.2") {
    const Cyl s = stretch_squeeze_closed_form(Cyl(0.5, 0, 0.3), pi);
    CHECK(s[0] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(s[2] == doctest::Approx(-0.2 + 0.2 * 0.5).epsilon(1e-14));

    const Cyl c1 = stretch_squeeze_closed_form(Cyl(1, 0, 0.5), pi);
    CHECK(c1[0] == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(c1[2] == doctest::Approx(-0.06).epsilon(1e-14));
    const Cyl c2 = stretch_squeeze_closed_form(Cyl(0.05, 0, -0.5), pi);
    CHECK(c2[0] == doctest::Approx(0.06).epsilon(1e-14));
    CHECK(c2[2] == doctest::Approx(-0.26).epsilon(1e-14));

    const TransversalSquare h = TransversalSquare{}.half_turn_image();
    CHECK(h.r_min == doctest::Approx(0.06));
    CHECK(h.r_max == doctest::Approx(1.26));
    CHECK(h.z_min == doctest::Approx(-0.26));
    CHECK(h.z_max == doctest::Approx(-0.06));
}

TEST_CASE("stretch and squeeze closed form matches numerical integration") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ur(0.05, 1.05), uz(-0.5, 0.5), ut(0.0, pi);
    auto field = [](const Cyl& s) { return stretch_squeeze_field(s); };
    for (int i = 0; i < 100; ++i) {
        const Cyl s0(ur(rng), 0, uz(rng));
        const double theta = ut(rng);
        if (theta < 1e-6) continue;
        const Cyl num = integrate_from(field, s0, theta, 1e-10).samples.back().state;
        const Cyl exact = stretch_squeeze_closed_form(s0, theta);
        CHECK((num - exact).norm() < 1e-6);
    }
    CHECK_THROWS_AS(stretch_squeeze_closed_form(Cyl(1, 0, 0), 4.0), Error);
}

TEST_CASE("fold field examples and closed form") {
    const Cyl f = fold_field(Cyl(0.76, 3 * pi / 2, 0.1));
    CHECK(f[0] == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(f[1] == 1.0);
    CHECK(f[2] == doctest::Approx(0.2).epsilon(1e-14));

    CHECK(fold_phase(pi) == doctest::Approx(0.0).scale(1.0));
    CHECK(fold_phase(3 * pi / 2) == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(fold_phase(2 * pi) == doctest::Approx(pi).epsilon(1e-14));

    const auto end = fold_closed_form(0.2, -pi / 2, 2 * pi);
    CHECK(end.phi == doctest::Approx(pi / 2).epsilon(1e-14));
    CHECK(end.r_tilde == doctest::Approx(0.0).scale(1.0));
    CHECK(end.z == doctest::Approx(0.2).epsilon(1e-14));
    CHECK_THROWS_AS(fold_closed_form(0.2, 0.0, 1.0), Error);
    CHECK_THROWS_AS(fold_closed_form(-0.1, 0.0, pi), Error);
}

TEST_CASE("fold flow preserves the radius about the arch centre and turns by pi") {
    auto field = [](const Cyl& s) { return fold_field(s); };
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ur(0.0, 0.6), uphi(-pi, pi);
    for (int i = 0; i < 20; ++i) {
        const double rho = ur(rng), phi0 = uphi(rng);
        const Cyl s0(gah_constants::fold_radius + rho * std::cos(phi0), pi, rho * std::sin(phi0));
        const auto traj = integrate_from(field, s0, 2 * pi);
        double drift = 0;
        for (const auto& smp : traj.samples) drift = std::max(drift, std::abs(fold_coords(smp.state).rho - rho));
        CHECK(drift < 1e-8);
        const auto fc = fold_coords(traj.samples.back().state);
        const double turned = std::remainder(fc.phi - phi0 - pi, 2 * pi);
        if (rho > 1e-3) CHECK(std::abs(turned) < 1e-10 / rho);
        const auto exact = fold_closed_form(rho, phi0, 2 * pi);
        CHECK(std::abs(fc.r_tilde - exact.r_tilde) < 1e-9);
        CHECK(std::abs(fc.z - exact.z) < 1e-9);
    }
}

TEST_CASE("branch selection") {
    CHECK(gah_branch(Cyl(0.5, 0.0, 0.0)) == GahBranch::StretchSqueeze);
    CHECK(gah_branch(Cyl(0.5, pi, 0.0)) == GahBranch::StretchSqueeze);
    CHECK(gah_branch(Cyl(0.5, 2 * pi, 0.0)) == GahBranch::StretchSqueeze);
    CHECK(gah_branch(Cyl(0.7, 4.0, -0.4)) == GahBranch::Fold);
    CHECK(gah_branch(Cyl(0.3, 4.0, 0.1)) == GahBranch::Fold);
    CHECK(gah_branch(Cyl(0.3, 4.0, -0.1)) == GahBranch::Blended);
    CHECK(gah_branch(Cyl(0.3, 4.0, -0.26)) == GahBranch::Blended);
    CHECK(gah_branch(Cyl(0.3, 4.0, -0.4)) == GahBranch::Rest);
    CHECK(gah_branch(Cyl(0.3, 4.0, -0.03)) == GahBranch::Rest);
    try {
        gah_branch(Cyl(std::nan(""), 4.0, 0.0));
        FAIL("expected AmbiguousBranch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AmbiguousBranch);
    }
}

TEST_CASE("field is 2pi-periodic in the angle") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> ur(0.0, 1.3), ut(0.0, 2 * pi), uz(-0.5, 0.5);
    for (int i = 0; i < 200; ++i) {
        const double r = ur(rng), t = ut(rng), z = uz(rng);
        CHECK((gah_field(Cyl(r, t, z)) - gah_field(Cyl(r, t + 2 * pi, z))).norm() < 1e-12);
        CHECK((gah_field(Cyl(r, t, z)) - gah_field(Cyl(r, t - 2 * pi, z))).norm() < 1e-12);
    }
}

TEST_CASE("field is continuous across its smooth seams") {
    const double e = 1e-9;
    // Half-turn seam and the closing seam at 2pi, for every (r, z).
    for (double r : {0.06, 0.3, 0.66, 1.0, 1.26}) {
        for (double z : {-0.5, -0.26, -0.1, 0.0, 0.3}) {
            CHECK((gah_field(Cyl(r, pi - e, z)) - gah_field(Cyl(r, pi + e, z))).norm() < 1e-6);
            CHECK((gah_field(Cyl(r, 2 * pi - e, z)) - gah_field(Cyl(r, 2 * pi + e, z))).norm() < 1e-6);
        }
    }
    // Fold circle r = 0.66 inside the band, and the blend start r = 0.06.
    for (double t : {3.5, 4.0, 4.7, 5.5}) {
        for (double z : {-0.25, -0.16, -0.07}) {
            CHECK((gah_field(Cyl(0.66 - e, t, z)) - gah_field(Cyl(0.66 + e, t, z))).norm() < 1e-6);
            CHECK((gah_field(Cyl(0.06 - e, t, z)) - gah_field(Cyl(0.06 + e, t, z))).norm() < 1e-6);
        }
        // Upper half plane: the fold branch on both sides.
        CHECK((gah_field(Cyl(0.66 - e, t, 0.2)) - gah_field(Cyl(0.66 + e, t, 0.2))).norm() < 1e-6);
    }
}

TEST_CASE("field jumps at r = 0.66 below the band") {
    // Off the blend band the inner branch is the rest field and the outer one the fold,
    // so the radial component jumps by sigma |z|. Images of Q0 never visit this set.
    const double e = 1e-9, t = 3 * pi / 2, z = -0.4;
    const Cyl inner = gah_field(Cyl(0.66 - e, t, z));
    const Cyl outer = gah_field(Cyl(0.66 + e, t, z));
    CHECK(inner[0] == 0.0);
    CHECK(outer[0] == doctest::Approx(-sigma(t) * z).epsilon(1e-12));
}

TEST_CASE("Q0 images lie strictly inside Q0") {
    const auto images = gah_poincare_image(q0_grid<double>(20));
    REQUIRE(images.size() == 400);
    const TransversalSquare q0;
    double min_margin = 1e9, r_lo = 1e9, r_hi = -1e9;
    for (const auto& im : images) {
        REQUIRE(im.image.has_value());
        CHECK(im.error.empty());
        min_margin = std::min(min_margin, q0.margin(im.image->x(), im.image->y()));
        r_lo = std::min(r_lo, im.image->x());
        r_hi = std::max(r_hi, im.image->x());
    }
    CHECK(min_margin > 0);
    CHECK(r_hi - r_lo <= 1.2 * (q0.r_max - q0.r_min));
}

TEST_CASE("seeds that start in the fold region map by an exact half turn") {
    CHECK(half_turn_image(0.55, 0.0).x() == doctest::Approx(0.66).epsilon(1e-14));
    CHECK(half_turn_image(0.55, 0.0).y() == doctest::Approx(0.16).epsilon(1e-14));

    std::vector<Vec2<double>> seeds = {{0.55, 0.0}, {1.05, -0.5}, {1.05, 0.5}, {0.8, 0.1}, {0.6, -0.45}};
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ur(0.55, 1.05), uz(-0.5, 0.5);
    for (int i = 0; i < 20; ++i) seeds.emplace_back(ur(rng), uz(rng));
    const auto images = gah_poincare_image(seeds);
    for (const auto& im : images) {
        REQUIRE(im.image.has_value());
        const Vec2<double> exact = half_turn_image(im.seed.x(), im.seed.y());
        CHECK((*im.image - exact).norm() < 1e-7);
    }
}

TEST_CASE("corner images") {
    // Left corners stretch to r = 0.06 where the blend vanishes, so they do not move
    // after the half turn; right corners take the rigid fold.
    const std::vector<Vec2<double>> seeds = {{0.05, -0.5}, {1.05, -0.5}, {1.05, 0.5}, {0.05, 0.5}};
    const std::vector<Vec2<double>> expected = {{0.06, -0.26}, {0.06, 0.26}, {0.06, 0.06}, {0.06, -0.06}};
    const auto images = gah_poincare_image(seeds);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        REQUIRE(images[i].image.has_value());
        CHECK((*images[i].image - expected[i]).norm() < 1e-7);
    }
}

TEST_CASE("blended seeds agree with a tight-tolerance reference") {
    IntegratorConfig<double> tight = gah_integrator_defaults<double>();
    tight.rel_tol = tight.abs_tol = 1e-13;
    tight.max_step = 0.01;
    const std::vector<Vec2<double>> seeds = {{0.3, 0.0}, {0.2, -0.3}, {0.4, 0.5}};
    const auto fast = gah_poincare_image(seeds);
    const auto ref = gah_poincare_image(seeds, tight);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        REQUIRE(fast[i].image.has_value());
        REQUIRE(ref[i].image.has_value());
        CHECK((*fast[i].image - *ref[i].image).norm() < 1e-8);
        // Only the radius moves in the blended branch, so z keeps its half-turn value.
        const Cyl mid = stretch_squeeze_closed_form(Cyl(seeds[i].x(), 0, seeds[i].y()), pi);
        if (mid[0] + 1e-9 < gah_constants::fold_radius && ref[i].image->x() < gah_constants::fold_radius) {
            CHECK(ref[i].image->y() == doctest::Approx(mid[2]).epsilon(1e-9));
        }
    }
}

TEST_CASE("return map failures") {
    try {
        gah_poincare_image(std::vector<Vec2<double>>{{2.0, 0.0}});
        FAIL("expected an out-of-Q0 error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidArgument);
    }

    IntegratorConfig<double> starved = gah_integrator_defaults<double>();
    starved.max_steps = 5;
    const auto images = gah_poincare_image(std::vector<Vec2<double>>{{0.3, 0.0}, {0.8, 0.1}}, starved);
    for (const auto& im : images) {
        CHECK_FALSE(im.image.has_value());
        CHECK_FALSE(im.error.empty());
    }
}
