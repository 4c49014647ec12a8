#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "gah/dynsys.hpp"

namespace gah {

using Clock = std::chrono::steady_clock;

template <typename Scalar>
struct IntegratorConfig {
    Scalar rel_tol = Scalar(1e-9);
    Scalar abs_tol = Scalar(1e-9);
    Scalar max_step = Scalar(0.01);
    std::pair<Scalar, Scalar> t_span{Scalar(0), Scalar(1000)};
    Vec3<Scalar> initial_state{Scalar(0), Scalar(1), Scalar(0)};
    /// Zero selects the initial step automatically.
    Scalar initial_step = Scalar(0);
    std::size_t max_steps = 50'000'000;
    /// Checked between steps; exceeding it raises ErrorKind::Timeout.
    std::optional<Clock::time_point> deadline{};

    void validate() const {
        require(std::isfinite(rel_tol) && rel_tol > 0, "rel_tol must be > 0");
        require(std::isfinite(abs_tol) && abs_tol > 0, "abs_tol must be > 0");
        require(std::isfinite(max_step) && max_step > 0, "max_step must be > 0");
        require(std::isfinite(t_span.first) && std::isfinite(t_span.second) && t_span.first < t_span.second,
                "t_span must be finite and increasing");
        require(all_finite(initial_state), "initial state must be finite", ErrorKind::NonFiniteState);
        require(initial_step >= 0, "initial_step must be >= 0");
    }
};

/// One accepted step together with its continuous extension (order 4).
template <typename Scalar>
struct DenseStep {
    Scalar t0{};
    Scalar h{};
    Eigen::Matrix<Scalar, 3, 5> coeffs = Eigen::Matrix<Scalar, 3, 5>::Zero();

    Scalar t1() const { return t0 + h; }

    Vec3<Scalar> operator()(Scalar t) const {
        const Scalar theta = (t - t0) / h;
        const Scalar theta1 = Scalar(1) - theta;
        return coeffs.col(0) +
               theta * (coeffs.col(1) + theta1 * (coeffs.col(2) + theta * (coeffs.col(3) + theta1 * coeffs.col(4))));
    }
};

template <typename Scalar>
struct Sample {
    Scalar t{};
    Vec3<Scalar> state = Vec3<Scalar>::Zero();
};

/// Discretized flow. When `steps` is non-empty, steps[i] interpolates samples[i] -> samples[i+1].
template <typename Scalar>
struct Trajectory {
    std::vector<Sample<Scalar>> samples;
    std::vector<DenseStep<Scalar>> steps;

    bool has_dense() const { return !samples.empty() && steps.size() + 1 == samples.size(); }

    std::vector<Scalar> step_sizes() const {
        std::vector<Scalar> out;
        out.reserve(steps.size());
        for (const auto& s : steps) out.push_back(s.h);
        return out;
    }

    /// Dense evaluation anywhere inside [t_front, t_back].
    Vec3<Scalar> at(Scalar t) const {
        require(has_dense(), "trajectory has no dense output", ErrorKind::MissingDenseOutput);
        require(t >= samples.front().t && t <= samples.back().t, "time outside trajectory span");
        auto it = std::upper_bound(samples.begin(), samples.end(), t,
                                   [](Scalar v, const Sample<Scalar>& s) { return v < s.t; });
        std::size_t idx = it == samples.begin() ? 0 : std::size_t(it - samples.begin()) - 1;
        idx = std::min(idx, steps.size() - 1);
        return steps[idx](t);
    }
};

/// Dormand-Prince 5(4) stepper with the standard free 4th-order interpolant.
template <typename Scalar, typename Field>
    requires VectorField<Field, Scalar>
class DormandPrince {
public:
    DormandPrince(Field field, const IntegratorConfig<Scalar>& cfg)
        : field_(std::move(field)), cfg_(cfg), t_(cfg.t_span.first), y_(cfg.initial_state) {
        cfg_.validate();
        k1_ = eval(y_);
        h_ = cfg_.initial_step > 0 ? std::min(cfg_.initial_step, cfg_.max_step) : initial_step();
    }

    bool done() const { return t_ >= cfg_.t_span.second; }
    Scalar time() const { return t_; }
    const Vec3<Scalar>& state() const { return y_; }
    std::size_t accepted() const { return accepted_; }

    /// Advances by one accepted step and returns it.
    const DenseStep<Scalar>& step() {
        require(!done(), "integration already reached the end of t_span");
        if (cfg_.deadline && (accepted_ & 0x3ff) == 0 && Clock::now() > *cfg_.deadline) {
            throw Error(ErrorKind::Timeout, "integration exceeded its deadline");
        }
        require(accepted_ < cfg_.max_steps, "maximum number of steps exceeded", ErrorKind::StepSizeUnderflow);

        const Scalar t_end = cfg_.t_span.second;
        bool rejected_last = false;
        for (;;) {
            Scalar h = std::min(h_, cfg_.max_step);
            bool last = false;
            if (t_end - t_ <= Scalar(1.01) * h && t_end - t_ <= cfg_.max_step) {
                h = t_end - t_;
                last = true;
            }
            const Scalar h_min = Scalar(16) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), std::abs(t_));
            if (h < h_min && !last) {
                throw Error(ErrorKind::StepSizeUnderflow, "step size underflow at t=" + std::to_string(double(t_)));
            }

            const Vec3<Scalar> k2 = eval(y_ + h * (a21 * k1_));
            const Vec3<Scalar> k3 = eval(y_ + h * (a31 * k1_ + a32 * k2));
            const Vec3<Scalar> k4 = eval(y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
            const Vec3<Scalar> k5 = eval(y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec3<Scalar> k6 = eval(y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vec3<Scalar> y_new = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            const Vec3<Scalar> k7 = eval(y_new);
            const Vec3<Scalar> err_vec = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const Vec3<Scalar> scale =
                (cfg_.abs_tol + cfg_.rel_tol * y_.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
            const Scalar err = std::sqrt((err_vec.array() / scale.array()).square().mean());

            if (!std::isfinite(err)) {
                throw Error(ErrorKind::NonFiniteState, "non-finite error estimate at t=" + std::to_string(double(t_)));
            }

            if (err <= Scalar(1)) {
                const Vec3<Scalar> ydiff = y_new - y_;
                const Vec3<Scalar> bspl = h * k1_ - ydiff;
                dense_.t0 = t_;
                dense_.h = h;
                dense_.coeffs.col(0) = y_;
                dense_.coeffs.col(1) = ydiff;
                dense_.coeffs.col(2) = bspl;
                dense_.coeffs.col(3) = ydiff - h * k7 - bspl;
                dense_.coeffs.col(4) = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

                t_ = last ? t_end : t_ + h;
                y_ = y_new;
                k1_ = k7;
                ++accepted_;

                Scalar fac = err == 0 ? Scalar(5) : Scalar(0.9) * std::pow(err, Scalar(-0.2));
                fac = std::clamp(fac, Scalar(0.2), rejected_last ? Scalar(1) : Scalar(5));
                h_ = std::min(h * fac, cfg_.max_step);
                return dense_;
            }

            rejected_last = true;
            Scalar fac = Scalar(0.9) * std::pow(err, Scalar(-0.2));
            h_ = h * std::clamp(fac, Scalar(0.1), Scalar(1));
        }
    }

private:
    Vec3<Scalar> eval(const Vec3<Scalar>& y) const {
        Vec3<Scalar> dy = field_(y);
        if (!all_finite(dy)) {
            throw Error(ErrorKind::NonFiniteState, "vector field returned a non-finite value");
        }
        return dy;
    }

    // Hairer, Norsett & Wanner starting-step heuristic.
    Scalar initial_step() const {
        const Vec3<Scalar> sc = (cfg_.abs_tol + cfg_.rel_tol * y_.cwiseAbs().array()).matrix();
        const Scalar d0 = std::sqrt((y_.array() / sc.array()).square().mean());
        const Scalar d1n = std::sqrt((k1_.array() / sc.array()).square().mean());
        Scalar h0 = (d0 < Scalar(1e-5) || d1n < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1n;
        h0 = std::min(h0, cfg_.max_step);
        const Vec3<Scalar> k2 = eval(y_ + h0 * k1_);
        const Scalar d2 = std::sqrt(((k2 - k1_).array() / sc.array()).square().mean()) / h0;
        const Scalar dm = std::max(d1n, d2);
        const Scalar h1 = dm <= Scalar(1e-15) ? std::max(Scalar(1e-6), h0 * Scalar(1e-3))
                                               : std::pow(Scalar(0.01) / dm, Scalar(0.2));
        return std::min({Scalar(100) * h0, h1, cfg_.max_step});
    }

    static constexpr Scalar a21 = Scalar(1) / 5;
    static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
    static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
    static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187, a53 = Scalar(64448) / 6561,
                            a54 = Scalar(-212) / 729;
    static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33, a63 = Scalar(46732) / 5247,
                            a64 = Scalar(49) / 176, a65 = Scalar(-5103) / 18656;
    static constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                            a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
    static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                            e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
    static constexpr Scalar d1 = Scalar(-12715105075.0) / Scalar(11282082432.0),
                            d3 = Scalar(87487479700.0) / Scalar(32700410799.0),
                            d4 = Scalar(-10690763975.0) / Scalar(1880347072.0),
                            d5 = Scalar(701980252875.0) / Scalar(199316789632.0),
                            d6 = Scalar(-1453857185.0) / Scalar(822651844.0),
                            d7 = Scalar(69997945.0) / Scalar(29380423.0);

    Field field_;
    IntegratorConfig<Scalar> cfg_;
    Scalar t_;
    Vec3<Scalar> y_;
    Vec3<Scalar> k1_;
    Scalar h_{};
    std::size_t accepted_ = 0;
    DenseStep<Scalar> dense_{};
};

/// Integrates over cfg.t_span and keeps every accepted step.
template <typename Scalar, typename Field>
    requires VectorField<Field, Scalar>
Trajectory<Scalar> integrate(Field field, const IntegratorConfig<Scalar>& cfg) {
    DormandPrince<Scalar, Field> stepper(std::move(field), cfg);
    Trajectory<Scalar> traj;
    traj.samples.push_back({stepper.time(), stepper.state()});
    while (!stepper.done()) {
        traj.steps.push_back(stepper.step());
        traj.samples.push_back({stepper.time(), stepper.state()});
    }
    return traj;
}

}  // namespace gah
