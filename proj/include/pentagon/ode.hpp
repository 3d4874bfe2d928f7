#pragma once

// Adaptive Dormand-Prince 5(4) for small fixed-size systems.

#include <pentagon/core.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace pentagon {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 1e-3;
    double max_step = 0.05;
    long max_steps = 10'000'000;
};

template <std::size_t N>
using OdeState = std::array<double, N>;

/// Integrator state carried between calls so a trajectory can be advanced piecewise.
template <std::size_t N>
class DormandPrince {
public:
    using State = OdeState<N>;
    using Rhs = std::function<State(double, const State&)>;
    using Projection = std::function<void(State&)>;

    DormandPrince(Rhs rhs, OdeOptions opts = {}, Projection project = nullptr)
        : rhs_(std::move(rhs)), opts_(opts), project_(std::move(project)) {
        if (!(opts_.rtol > 0.0) || !(opts_.atol > 0.0))
            throw Error(ErrorCode::InvalidInput, "tolerances must be positive");
    }

    /// Advances y from t0 to t1 (either direction), landing exactly on t1.
    State advance(double t0, double t1, State y) {
        if (t0 == t1) return y;
        const double dir = t1 > t0 ? 1.0 : -1.0;
        double t = t0;
        double h = std::min(std::abs(h_ > 0.0 ? h_ : opts_.initial_step), opts_.max_step);
        long steps = 0;
        while (dir * (t1 - t) > 0.0) {
            if (++steps > opts_.max_steps) throw Error(ErrorCode::ConvergenceFailure, "too many ODE steps");
            bool last = false;
            if (h >= dir * (t1 - t)) {
                h = dir * (t1 - t);
                last = true;
            }
            State y_new, err;
            step(t, y, dir * h, y_new, err);
            double en = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                en = std::max(en, std::abs(err[i]) / sc);
            }
            if (en <= 1.0) {
                t = last ? t1 : t + dir * h;
                y = y_new;
                if (project_) project_(y);
                const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                if (!last) h_ = std::min(h * fac, opts_.max_step);
                h = std::min(h * fac, opts_.max_step);
            } else {
                h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
                if (h < 1e-14) throw Error(ErrorCode::ConvergenceFailure, "ODE step size underflow");
            }
        }
        return y;
    }

private:
    void step(double t, const State& y, double h, State& out, State& err) const {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;
        auto axpy = [&](std::initializer_list<std::pair<double, const State*>> terms) {
            State r = y;
            for (const auto& [c, k] : terms)
                for (std::size_t i = 0; i < N; ++i) r[i] += h * c * (*k)[i];
            return r;
        };
        const State k1 = rhs_(t, y);
        const State k2 = rhs_(t + c2 * h, axpy({{a21, &k1}}));
        const State k3 = rhs_(t + c3 * h, axpy({{a31, &k1}, {a32, &k2}}));
        const State k4 = rhs_(t + c4 * h, axpy({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 = rhs_(t + c5 * h, axpy({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = rhs_(t + h, axpy({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        out = axpy({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State k7 = rhs_(t + h, out);
        for (std::size_t i = 0; i < N; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    Rhs rhs_;
    OdeOptions opts_;
    Projection project_;
    double h_ = 0.0;
};

}  // namespace pentagon
