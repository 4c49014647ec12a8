#pragma once

#include <cmath>
#include <concepts>
#include <string>

#include <Eigen/Dense>

#include "gah/error.hpp"

namespace gah {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using State3 = Vec3<double>;
using Point2 = Vec2<double>;

/// An autonomous vector field on R^3.
template <typename F, typename Scalar>
concept VectorField = requires(const F& f, const Vec3<Scalar>& s) {
    { f(s) } -> std::convertible_to<Vec3<Scalar>>;
};

enum class Axis { X = 0, Y = 1, Z = 2 };

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
    return v.allFinite();
}

/// Builds a state, rejecting NaN/Inf components.
template <typename Scalar>
Vec3<Scalar> make_state(Scalar x, Scalar y, Scalar z) {
    Vec3<Scalar> s(x, y, z);
    require(all_finite(s), "state has a non-finite component", ErrorKind::NonFiniteState);
    return s;
}

template <typename Scalar>
struct RosslerParams {
    Scalar a = Scalar(0.2);
    Scalar b = Scalar(0.1);
    Scalar c = Scalar(10);

    void validate() const {
        require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c), "Rossler parameters must be finite");
    }
};

/// Rossler field with the sign convention xdot = -y - z.
template <typename Scalar>
Vec3<Scalar> rossler_field(const Vec3<Scalar>& s, const RosslerParams<Scalar>& p) {
    return Vec3<Scalar>(-s.y() - s.z(), s.x() + p.a * s.y(), p.b + s.z() * (s.x() - p.c));
}

template <typename Scalar>
Mat3<Scalar> rossler_jacobian(const Vec3<Scalar>& s, const RosslerParams<Scalar>& p) {
    Mat3<Scalar> j;
    // clang-format off
    j << Scalar(0), Scalar(-1), Scalar(-1),
         Scalar(1), p.a,        Scalar(0),
         s.z(),     Scalar(0),  s.x() - p.c;
    // clang-format on
    return j;
}

template <typename Scalar>
struct Rossler {
    RosslerParams<Scalar> params{};

    Vec3<Scalar> operator()(const Vec3<Scalar>& s) const { return rossler_field(s, params); }
};

/// Standard right-handed rotation by `angle` about a coordinate axis.
template <typename Scalar>
Mat3<Scalar> rotation_matrix(Scalar angle, Axis axis) {
    using Eigen::AngleAxis;
    switch (axis) {
        case Axis::X: return AngleAxis<Scalar>(angle, Vec3<Scalar>::UnitX()).toRotationMatrix();
        case Axis::Y: return AngleAxis<Scalar>(angle, Vec3<Scalar>::UnitY()).toRotationMatrix();
        case Axis::Z: break;
    }
    return AngleAxis<Scalar>(angle, Vec3<Scalar>::UnitZ()).toRotationMatrix();
}

template <typename Scalar>
Vec3<Scalar> rotate_frame(const Vec3<Scalar>& s, Scalar angle, Axis axis) {
    return rotation_matrix(angle, axis) * s;
}

inline Axis parse_axis(const std::string& name) {
    if (name == "x" || name == "X") return Axis::X;
    if (name == "y" || name == "Y") return Axis::Y;
    if (name == "z" || name == "Z") return Axis::Z;
    throw Error(ErrorKind::InvalidArgument, "unknown axis '" + name + "'");
}

inline const char* axis_name(Axis axis) {
    switch (axis) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
    }
    return "z";
}

}  // namespace gah
