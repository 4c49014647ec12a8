#pragma once

#include <optional>
#include <vector>

#include "gah/parallel.hpp"
#include "gah/polygon.hpp"
#include "gah/section.hpp"

namespace gah {

struct IterationStats {
    std::size_t returned = 0;
    std::size_t inside = 0;
    std::size_t escaped = 0;
    std::size_t no_return = 0;
    /// Smallest signed margin of the returned images; empty when nothing returned.
    std::optional<double> min_margin;
};

struct ContainmentReport {
    std::size_t total_seeds = 0;
    std::vector<IterationStats> per_iteration;
    /// Fraction of seeds allowed to fail to return.
    double no_return_tolerance = 0.005;

    /// f(Q) inside int Q for every iteration: no escapes, and few enough missing returns.
    bool trapping() const {
        for (const auto& it : per_iteration) {
            if (it.escaped != 0) return false;
            if (double(it.no_return) > no_return_tolerance * double(total_seeds)) return false;
        }
        return !per_iteration.empty();
    }
};

template <typename Scalar>
struct CloudPoint {
    std::size_t seed = 0;
    Vec2<Scalar> point = Vec2<Scalar>::Zero();
    Scalar margin{};
};

template <typename Scalar>
struct TrappingRun {
    ContainmentReport report;
    std::vector<Vec2<Scalar>> boundary;
    /// clouds[j] holds the (j+1)-th images, in seed order.
    std::vector<std::vector<CloudPoint<Scalar>>> clouds;

    std::vector<Vec2<Scalar>> cloud_points(std::size_t j) const {
        std::vector<Vec2<Scalar>> out;
        out.reserve(clouds.at(j).size());
        for (const auto& c : clouds[j]) out.push_back(c.point);
        return out;
    }
};

template <typename Scalar>
struct TrappingOptions {
    std::size_t points_per_edge = 100;
    std::size_t iterations = 1;
    double no_return_tolerance = 0.005;
    ReturnOptions<Scalar> returns{};
};

/// Iterates the discretized quadrilateral boundary and classifies every image against the quadrilateral.
template <typename Scalar, typename Field>
    requires VectorField<Field, Scalar>
TrappingRun<Scalar> verify_trapping(const Quadrilateral<Scalar>& q, const SectionPlane<Scalar>& plane, const Field& field,
                                    const IntegratorConfig<Scalar>& cfg, const TrappingOptions<Scalar>& opts) {
    q.validate();
    plane.validate();
    cfg.validate();
    require(opts.iterations >= 1, "iteration count must be >= 1");

    TrappingRun<Scalar> run;
    run.boundary = discretize_edges(q, opts.points_per_edge);
    const std::size_t n = run.boundary.size();

    std::vector<MapOrbit<Scalar>> orbits(n);
    parallel_for(n, [&](std::size_t i) {
        orbits[i] = iterate_map(plane.lift(run.boundary[i]), plane, field, cfg, opts.iterations, opts.returns);
    });

    run.report.total_seeds = n;
    run.report.no_return_tolerance = opts.no_return_tolerance;
    run.report.per_iteration.resize(opts.iterations);
    run.clouds.resize(opts.iterations);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& results = orbits[i].results;
        for (std::size_t j = 0; j < results.size(); ++j) {
            const Vec2<Scalar> img = plane.planar(results[j].image);
            const PolygonTest<Scalar> test = point_in_polygon(img, q);
            auto& stats = run.report.per_iteration[j];
            ++stats.returned;
            // Boundary hits count as escapes: trapping means the open interior.
            if (test.location == Location::Inside && test.margin > 0) {
                ++stats.inside;
            } else {
                ++stats.escaped;
            }
            stats.min_margin = stats.min_margin ? std::min(*stats.min_margin, double(test.margin)) : double(test.margin);
            run.clouds[j].push_back({i, img, test.margin});
        }
    }
    for (auto& stats : run.report.per_iteration) stats.no_return = n - stats.returned;
    return run;
}

struct NestingCheck {
    /// Smallest signed margin of cloud j+1 against hull(cloud j), per j.
    std::vector<double> min_margin;
    /// Sampling slack: a finite cloud's hull under-covers the true image by O(spacing^2).
    double slack = 0;
    bool nested = false;
};

/// Checks that every cloud lies in the convex hull of the previous one, up to
/// `rel_slack` times the diameter of that hull.
template <typename Scalar>
NestingCheck check_nesting(const TrappingRun<Scalar>& run, double rel_slack = 1e-3) {
    NestingCheck out;
    out.nested = true;
    for (std::size_t j = 1; j < run.clouds.size(); ++j) {
        const auto outer = run.cloud_points(j - 1);
        const auto hull = convex_hull(outer);
        double diameter = 0;
        for (std::size_t a = 0; a < hull.size(); ++a) {
            for (std::size_t b = a + 1; b < hull.size(); ++b) diameter = std::max(diameter, double((hull[a] - hull[b]).norm()));
        }
        const double slack = rel_slack * diameter;
        out.slack = std::max(out.slack, slack);
        const double m = double(min_margin_in_hull(run.cloud_points(j), outer));
        out.min_margin.push_back(m);
        if (m < -slack) out.nested = false;
    }
    return out;
}

template <typename Scalar>
struct AttractorApproximation {
    std::vector<Vec2<Scalar>> points;
    ContainmentReport report;
};

/// Union of the iterates k_burn+1 .. k of the trapping-region boundary.
template <typename Scalar, typename Field>
    requires VectorField<Field, Scalar>
AttractorApproximation<Scalar> approximate_attractor(const Quadrilateral<Scalar>& q, const SectionPlane<Scalar>& plane,
                                                     const Field& field, const IntegratorConfig<Scalar>& cfg,
                                                     const TrappingOptions<Scalar>& opts, std::size_t k_burn = 2) {
    require(k_burn < opts.iterations, "burn-in must be smaller than the iteration count");
    const TrappingRun<Scalar> run = verify_trapping(q, plane, field, cfg, opts);
    if (!run.report.trapping()) {
        throw Error(ErrorKind::NotTrapping, "quadrilateral is not a trapping region for these settings");
    }
    AttractorApproximation<Scalar> out;
    out.report = run.report;
    for (std::size_t j = k_burn; j < opts.iterations; ++j) {
        for (const auto& c : run.clouds[j]) out.points.push_back(c.point);
    }
    return out;
}

}  // namespace gah
