#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "gah/dynsys.hpp"

namespace gah {

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
    return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
Scalar segment_distance(const Vec2<Scalar>& p, const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
    const Vec2<Scalar> ab = b - a;
    const Scalar len2 = ab.squaredNorm();
    Scalar s = len2 > 0 ? (p - a).dot(ab) / len2 : Scalar(0);
    s = std::clamp(s, Scalar(0), Scalar(1));
    return (p - (a + s * ab)).norm();
}

template <typename Scalar>
bool segments_intersect(const Vec2<Scalar>& p1, const Vec2<Scalar>& p2, const Vec2<Scalar>& q1, const Vec2<Scalar>& q2) {
    auto orient = [](const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c) {
        const Scalar v = cross2<Scalar>(b - a, c - a);
        return (v > 0) - (v < 0);
    };
    auto on_segment = [](const Vec2<Scalar>& a, const Vec2<Scalar>& b, const Vec2<Scalar>& c) {
        return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= c.y() &&
               c.y() <= std::max(a.y(), b.y());
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2), o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    return (o1 == 0 && on_segment(p1, p2, q1)) || (o2 == 0 && on_segment(p1, p2, q2)) ||
           (o3 == 0 && on_segment(q1, q2, p1)) || (o4 == 0 && on_segment(q1, q2, p2));
}

/// Winding number of a closed polygon around p; nonzero means inside.
template <typename Scalar>
int winding_number(const Vec2<Scalar>& p, std::span<const Vec2<Scalar>> poly) {
    auto is_left = [&](const Vec2<Scalar>& a, const Vec2<Scalar>& b) { return cross2<Scalar>(b - a, p - a); };
    int wn = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2<Scalar>& a = poly[i];
        const Vec2<Scalar>& b = poly[(i + 1) % n];
        if (a.y() <= p.y()) {
            if (b.y() > p.y() && is_left(a, b) > 0) ++wn;
        } else if (b.y() <= p.y() && is_left(a, b) < 0) {
            --wn;
        }
    }
    return wn;
}

enum class Location { Inside, Boundary, Outside };

inline const char* location_name(Location l) {
    switch (l) {
        case Location::Inside: return "inside";
        case Location::Boundary: return "boundary";
        case Location::Outside: return "outside";
    }
    return "outside";
}

template <typename Scalar>
struct PolygonTest {
    Location location = Location::Outside;
    /// Signed distance to the nearest edge, positive inside.
    Scalar margin{};
};

template <typename Scalar>
PolygonTest<Scalar> point_in_polygon(const Vec2<Scalar>& p, std::span<const Vec2<Scalar>> poly,
                                     Scalar boundary_tol = Scalar(1e-12)) {
    Scalar dist = std::numeric_limits<Scalar>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        dist = std::min(dist, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
    }
    const bool inside = winding_number(p, poly) != 0;
    const Scalar margin = inside ? dist : -dist;
    if (dist < boundary_tol) return {Location::Boundary, margin};
    return {inside ? Location::Inside : Location::Outside, margin};
}

template <typename Scalar>
struct Quadrilateral {
    std::array<Vec2<Scalar>, 4> vertices{};

    std::span<const Vec2<Scalar>> span() const { return {vertices.data(), vertices.size()}; }

    Vec2<Scalar> centroid() const {
        return (vertices[0] + vertices[1] + vertices[2] + vertices[3]) / Scalar(4);
    }

    /// Simple (no self-intersection) with no three consecutive collinear vertices.
    void validate() const {
        Scalar scale = 0;
        for (const auto& v : vertices) {
            require(all_finite(v), "quadrilateral vertices must be finite");
            scale = std::max(scale, v.cwiseAbs().maxCoeff());
        }
        const Scalar eps = Scalar(1e-12) * std::max(Scalar(1), scale * scale);
        for (int i = 0; i < 4; ++i) {
            const auto& a = vertices[i];
            const auto& b = vertices[(i + 1) % 4];
            const auto& c = vertices[(i + 2) % 4];
            require(std::abs(cross2<Scalar>(b - a, c - b)) > eps, "quadrilateral has collinear vertices");
        }
        require(!segments_intersect(vertices[0], vertices[1], vertices[2], vertices[3]) &&
                    !segments_intersect(vertices[1], vertices[2], vertices[3], vertices[0]),
                "quadrilateral is self-intersecting");
    }

    Quadrilateral scaled_about_centroid(Scalar factor) const {
        Quadrilateral out;
        const Vec2<Scalar> c = centroid();
        for (int i = 0; i < 4; ++i) out.vertices[i] = c + factor * (vertices[i] - c);
        return out;
    }
};

template <typename Scalar = double>
Quadrilateral<Scalar> rossler_figure_quadrilateral() {
    return {{Vec2<Scalar>(-3.55, -27), Vec2<Scalar>(11.91, -6.6), Vec2<Scalar>(12, 0), Vec2<Scalar>(-8.5, 3.5)}};
}

/// Each directed edge contributes its start vertex plus `points_per_edge` interior points.
template <typename Scalar>
std::vector<Vec2<Scalar>> discretize_edges(const Quadrilateral<Scalar>& q, std::size_t points_per_edge) {
    std::vector<Vec2<Scalar>> out;
    out.reserve(4 * (points_per_edge + 1));
    const Scalar denom = Scalar(points_per_edge + 1);
    for (int e = 0; e < 4; ++e) {
        const Vec2<Scalar>& a = q.vertices[e];
        const Vec2<Scalar>& b = q.vertices[(e + 1) % 4];
        for (std::size_t k = 0; k <= points_per_edge; ++k) {
            const Scalar s = Scalar(k) / denom;
            out.push_back(a + s * (b - a));
        }
    }
    return out;
}

template <typename Scalar>
PolygonTest<Scalar> point_in_polygon(const Vec2<Scalar>& p, const Quadrilateral<Scalar>& q) {
    return point_in_polygon<Scalar>(p, q.span());
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
template <typename Scalar>
std::vector<Vec2<Scalar>> convex_hull(std::vector<Vec2<Scalar>> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2<Scalar>> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross2<Scalar>(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        const auto& p = pts[i];
        while (k >= lower && cross2<Scalar>(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0) --k;
        hull[k++] = p;
    }
    hull.resize(k - 1);
    return hull;
}

template <typename Scalar>
Scalar polygon_area(std::span<const Vec2<Scalar>> poly) {
    Scalar twice = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) twice += cross2<Scalar>(poly[i], poly[(i + 1) % poly.size()]);
    return std::abs(twice) / 2;
}

template <typename Scalar>
Scalar hull_area(const std::vector<Vec2<Scalar>>& pts) {
    const auto hull = convex_hull(pts);
    if (hull.size() < 3) return Scalar(0);
    return polygon_area<Scalar>(hull);
}

/// Smallest signed margin of `pts` against the convex hull of `outer` (negative means outside).
template <typename Scalar>
Scalar min_margin_in_hull(const std::vector<Vec2<Scalar>>& pts, const std::vector<Vec2<Scalar>>& outer) {
    const auto hull = convex_hull(outer);
    require(hull.size() >= 3, "hull of the outer cloud is degenerate");
    Scalar worst = std::numeric_limits<Scalar>::infinity();
    for (const auto& p : pts) worst = std::min(worst, point_in_polygon<Scalar>(p, hull).margin);
    return worst;
}

}  // namespace gah
