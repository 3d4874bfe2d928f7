#pragma once

// Closed loops on the shape surface: the B = 0 contours traced by the
// cross-product flow, the local-chart Hamiltonian tracer used to cross-check
// them, and the piecewise-analytic convex-boundary loop.

#include <pentagon/fields.hpp>
#include <pentagon/ode.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace pentagon {

enum class LoopLabel { Pentagram, Pentagon, ConvexBoundary, Unlabelled };

inline const char* to_string(LoopLabel l) {
    switch (l) {
        case LoopLabel::Pentagram: return "pentagram";
        case LoopLabel::Pentagon: return "pentagon";
        case LoopLabel::ConvexBoundary: return "convex_boundary";
        case LoopLabel::Unlabelled: return "unlabelled";
    }
    return "?";
}

/// Position (a continuous lift on R^3, not normalized) and velocity.
struct LoopState {
    Vec3 alpha{};
    Vec3 alpha_dot{};
};

struct LoopSample {
    double t = 0.0;
    Vec3 alpha{};
    Vec3 alpha_dot{};
    PsiShape psi;
};

struct LoopResiduals {
    double closure = 0.0;  // torus distance between the first and last sample
    double max_C = 0.0;
    double max_B = 0.0;
};

/// A sampled curve on the shape surface, closed or open, with an exact
/// evaluator for its state at arbitrary times.
class ParametrizedLoop {
public:
    using Evaluator = std::function<LoopState(double)>;

    /// samples must include both ends t = 0 and t = tau.
    ParametrizedLoop(LoopLabel label, double tau, int orientation, std::vector<LoopSample> samples,
                     Evaluator evaluator, std::vector<double> breakpoints = {}, bool closed = true,
                     bool zero_B = false)
        : label_(label),
          tau_(tau),
          orientation_(orientation),
          samples_(std::move(samples)),
          evaluator_(std::move(evaluator)),
          breakpoints_(std::move(breakpoints)),
          closed_(closed),
          zero_B_(zero_B) {
        if (samples_.size() < 2) throw Error(ErrorCode::InvalidInput, "a loop needs at least two samples");
        if (!(tau_ > 0.0)) throw Error(ErrorCode::InvalidInput, "loop period must be positive");
    }

    /// Builds the sample table from an evaluator on M + 1 uniform times.
    static ParametrizedLoop from_evaluator(LoopLabel label, double tau, int orientation, Evaluator ev,
                                           std::size_t M, std::vector<double> breakpoints = {}, bool closed = true,
                                           bool zero_B = false) {
        if (M < 2) throw Error(ErrorCode::InvalidInput, "sample count must be at least 2");
        std::vector<LoopSample> samples;
        samples.reserve(M + 1);
        for (std::size_t i = 0; i <= M; ++i) {
            const double t = tau * static_cast<double>(i) / static_cast<double>(M);
            samples.push_back(make_sample(t, ev(t)));
        }
        return ParametrizedLoop(label, tau, orientation, std::move(samples), std::move(ev), std::move(breakpoints),
                                closed, zero_B);
    }

    static LoopSample make_sample(double t, const LoopState& s) {
        return {t, s.alpha, s.alpha_dot, alpha_to_psi(TorusPoint::from(s.alpha), 1e-8)};
    }

    LoopLabel label() const { return label_; }
    double tau() const { return tau_; }
    double omega() const { return two_pi / tau_; }
    int orientation() const { return orientation_; }
    bool closed() const { return closed_; }
    bool zero_B() const { return zero_B_; }
    const std::vector<LoopSample>& samples() const { return samples_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    /// State at any time; closed loops are extended periodically (up to a lattice shift in alpha).
    LoopState state(double t) const { return evaluator_(t); }

    LoopResiduals residuals() const {
        LoopResiduals r;
        r.closure = shape_space_distance(samples_.front().alpha, samples_.back().alpha);
        for (const LoopSample& s : samples_) {
            const TorusPoint p = TorusPoint::from(s.alpha);
            r.max_C = std::max(r.max_C, std::abs(constraint_C(p)));
            r.max_B = std::max(r.max_B, std::abs(magnetic_B(p)));
        }
        return r;
    }

    /// The same curve traversed backwards.
    ParametrizedLoop reversed() const {
        const double tau = tau_;
        Evaluator ev = [inner = evaluator_, tau](double s) {
            LoopState st = inner(tau - s);
            st.alpha_dot = -st.alpha_dot;
            return st;
        };
        std::vector<LoopSample> samples(samples_.rbegin(), samples_.rend());
        for (LoopSample& s : samples) {
            s.t = tau - s.t;
            s.alpha_dot = -s.alpha_dot;
        }
        std::vector<double> bps;
        for (auto it = breakpoints_.rbegin(); it != breakpoints_.rend(); ++it) bps.push_back(tau - *it);
        return ParametrizedLoop(label_, tau_, -orientation_, std::move(samples), std::move(ev), std::move(bps),
                                closed_, zero_B_);
    }

    /// Reparametrized copy: new time s maps to old time warp(s), with warp monotone
    /// increasing from [0, tau] onto [0, tau] up to a constant shift.
    ParametrizedLoop reparametrized(std::function<double(double)> warp, std::function<double(double)> warp_rate,
                                    std::size_t M) const {
        Evaluator ev = [inner = evaluator_, warp, warp_rate](double s) {
            LoopState st = inner(warp(s));
            st.alpha_dot = warp_rate(s) * st.alpha_dot;
            return st;
        };
        std::vector<double> bps;
        for (double b : breakpoints_) {
            // invert the warp by bisection
            double lo = -tau_, hi = 2.0 * tau_;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                (warp(mid) < b ? lo : hi) = mid;
            }
            bps.push_back(0.5 * (lo + hi));
        }
        return from_evaluator(label_, tau_, orientation_, std::move(ev), M, std::move(bps), closed_, zero_B_);
    }

    /// Time-shifted copy, t -> t + dt.
    ParametrizedLoop shifted(double dt) const {
        return reparametrized([dt](double s) { return s + dt; }, [](double) { return 1.0; }, samples_.size() - 1);
    }

private:
    LoopLabel label_;
    double tau_;
    int orientation_;
    std::vector<LoopSample> samples_;
    Evaluator evaluator_;
    std::vector<double> breakpoints_;
    bool closed_;
    bool zero_B_;
};

// ---------------------------------------------------------------------------
// Flows

namespace detail {

using Flow = std::function<Vec3(const Vec3&)>;

/// Newton projection of a onto C = 0 and, when with_H, H = 0.
inline Vec3 project_to_contour(Vec3 a, bool with_H) {
    for (int it = 0; it < 8; ++it) {
        const TorusPoint p = TorusPoint::from(a);
        const double c = constraint_C(p);
        const Vec3 gc = grad_C(p);
        if (!with_H) {
            if (std::abs(c) < 1e-15) break;
            a = a - (c / dot(gc, gc)) * gc;
            continue;
        }
        const double h = contour_hamiltonian(p);
        if (std::abs(c) < 1e-15 && std::abs(h) < 1e-15) break;
        const Vec3 gh = grad_contour_hamiltonian(p);
        // minimal-norm solution of J d = -r with J = [gc; gh]
        const double m11 = dot(gc, gc), m12 = dot(gc, gh), m22 = dot(gh, gh);
        const double det = m11 * m22 - m12 * m12;
        if (!(std::abs(det) > 1e-300)) throw Error(ErrorCode::DriftExceeded, "degenerate contour projection");
        const double l1 = (-c * m22 + h * m12) / det;
        const double l2 = (-h * m11 + c * m12) / det;
        a = a + l1 * gc + l2 * gh;
    }
    if (std::abs(constraint_C(TorusPoint::from(a))) > 1e-8)
        throw Error(ErrorCode::DriftExceeded, "projection could not restore |C| < 1e-8");
    return a;
}

inline Vec3 to_vec(const OdeState<3>& y) { return {y[0], y[1], y[2]}; }
inline OdeState<3> to_state(const Vec3& v) { return {v[0], v[1], v[2]}; }

/// Integrates the autonomous flow with projection from a to time t (t may be negative).
inline Vec3 flow_from(const Flow& flow, bool with_H, const OdeOptions& opts, const Vec3& a, double t) {
    DormandPrince<3> dp([&flow](double, const OdeState<3>& y) { return to_state(flow(to_vec(y))); }, opts,
                        [with_H](OdeState<3>& y) { y = to_state(project_to_contour(to_vec(y), with_H)); });
    return to_vec(dp.advance(0.0, t, to_state(a)));
}

/// Uniform samples t_i = i T / M of the flow, integrated continuously.
inline std::vector<Vec3> flow_samples(const Flow& flow, bool with_H, const OdeOptions& opts, const Vec3& a0,
                                      double T, std::size_t M) {
    DormandPrince<3> dp([&flow](double, const OdeState<3>& y) { return to_state(flow(to_vec(y))); }, opts,
                        [with_H](OdeState<3>& y) { y = to_state(project_to_contour(to_vec(y), with_H)); });
    std::vector<Vec3> out{a0};
    out.reserve(M + 1);
    OdeState<3> y = to_state(a0);
    for (std::size_t i = 1; i <= M; ++i) {
        const double t0 = T * static_cast<double>(i - 1) / static_cast<double>(M);
        const double t1 = T * static_cast<double>(i) / static_cast<double>(M);
        y = dp.advance(t0, t1, y);
        out.push_back(to_vec(y));
    }
    return out;
}

/// Hops from a stored sample are short, so they can afford tolerances near roundoff;
/// this keeps finite differences of the evaluator smooth.
inline OdeOptions fine_hop_options(OdeOptions o) {
    o.rtol = std::min(o.rtol, 1e-13);
    o.atol = std::min(o.atol, 1e-15);
    return o;
}

/// Evaluator for a flow-generated loop: re-integrates from the nearest stored sample.
/// Closed loops extend periodically with the lattice shift accumulated over one period.
inline ParametrizedLoop::Evaluator flow_evaluator(Flow flow, bool with_H, OdeOptions opts,
                                                  std::shared_ptr<const std::vector<Vec3>> pts, double T,
                                                  bool periodic) {
    const Vec3 shift = periodic ? pts->back() - pts->front() - lattice_reduce(pts->back() - pts->front())
                                : Vec3{0.0, 0.0, 0.0};
    opts = fine_hop_options(opts);
    return [flow = std::move(flow), with_H, opts, pts, T, periodic, shift](double t) {
        Vec3 offset{0.0, 0.0, 0.0};
        const std::size_t M = pts->size() - 1;
        const double h = T / static_cast<double>(M);
        if (periodic) {
            // times within half a sample of a period boundary all hop from sample 0
            const double k = std::floor((t + 0.5 * h) / T);
            t -= k * T;
            offset = k * shift;
        }
        const long idx = std::clamp(std::lround(t / h), 0L, static_cast<long>(M));
        const double t0 = static_cast<double>(idx) * h;
        const Vec3& a0 = (*pts)[static_cast<std::size_t>(idx)];
        const Vec3 a = std::abs(t - t0) < 1e-15 ? a0 : flow_from(flow, with_H, opts, a0, t - t0);
        return LoopState{a + offset, flow(a)};
    };
}

inline std::vector<LoopSample> flow_loop_samples(const Flow& flow, const std::vector<Vec3>& pts, double T) {
    std::vector<LoopSample> out;
    out.reserve(pts.size());
    const std::size_t M = pts.size() - 1;
    for (std::size_t i = 0; i <= M; ++i) {
        const double t = T * static_cast<double>(i) / static_cast<double>(M);
        out.push_back(ParametrizedLoop::make_sample(t, {pts[i], flow(pts[i])}));
    }
    return out;
}

}  // namespace detail

/// Velocity of the contour flow: sign * grad C x grad H.
inline detail::Flow global_contour_flow(double sign) {
    return [sign](const Vec3& a) { return sign * contour_velocity(TorusPoint::from(a)); };
}

// ---------------------------------------------------------------------------
// Seeding

/// First point of {B = 0} along a tangent ray from center; direction is taken in
/// an orthonormal basis of the tangent plane at center.
inline AlphaPoint seed_zero_B(const AlphaPoint& center, const std::array<double, 2>& direction) {
    const TorusPoint c = center;
    if (std::abs(magnetic_B(c)) < 1e-12) throw Error(ErrorCode::InvalidInput, "B vanishes at the seed center");
    const double dn = std::hypot(direction[0], direction[1]);
    if (!(dn > 0.0)) throw Error(ErrorCode::InvalidInput, "seed direction must be non-zero");
    const auto [u, v] = detail::tangent_basis(grad_C(c));
    const Vec3 d = (direction[0] / dn) * u + (direction[1] / dn) * v;
    auto point_at = [&](double r) { return detail::project_to_contour(center.vec() + r * d, false); };
    auto b_at = [&](double r) { return magnetic_B(TorusPoint::from(point_at(r))); };
    const double step = 0.01;
    double lo = 0.0, b_lo = magnetic_B(c);
    for (double r = step; r <= pi + 1e-12; r += step) {
        const double b = b_at(r);
        if ((b > 0.0) != (b_lo > 0.0)) {
            double hi = r;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double bm = b_at(mid);
                if (std::abs(bm) < 1e-12 && hi - lo < 1e-13) {
                    lo = hi = mid;
                    break;
                }
                if ((bm > 0.0) == (b_lo > 0.0))
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo < 1e-16) break;
            }
            const Vec3 seed = detail::project_to_contour(point_at(0.5 * (lo + hi)), true);
            const TorusPoint sp = TorusPoint::from(seed);
            if (std::abs(magnetic_B(sp)) > 1e-12)
                throw Error(ErrorCode::ConvergenceFailure, "seed refinement did not reach |B| < 1e-12");
            return AlphaPoint::normalized(sp);
        }
        lo = r;
        b_lo = b;
    }
    throw Error(ErrorCode::NoCrossing, "B does not change sign along the ray");
}

// ---------------------------------------------------------------------------
// Global tracer

struct TraceOptions {
    OdeOptions ode{};
    std::size_t samples = 4096;
    double max_time = 100.0;
    double leave_radius = 0.1;
    double chunk = 2e-3;
};

namespace detail {

/// First return time to the transverse section through a0.
inline double find_period(const Flow& flow, const Vec3& a0, const TraceOptions& o) {
    const Vec3 n = flow(a0);
    auto section = [&](const Vec3& a) { return dot(lattice_reduce(a - a0), n); };
    DormandPrince<3> dp([&flow](double, const OdeState<3>& y) { return to_state(flow(to_vec(y))); }, o.ode,
                        [](OdeState<3>& y) { y = to_state(project_to_contour(to_vec(y), true)); });
    OdeState<3> y = to_state(a0);
    double t = 0.0;
    bool left = false;
    while (t < o.max_time) {
        const OdeState<3> y_prev = y;
        y = dp.advance(t, t + o.chunk, y);
        const double t_prev = t;
        t += o.chunk;
        const Vec3 a = to_vec(y);
        const double dist = norm(lattice_reduce(a - a0));
        if (dist > o.leave_radius) left = true;
        if (!left || dist > o.leave_radius) continue;
        const double s_prev = section(to_vec(y_prev)), s_now = section(a);
        if (s_prev < 0.0 && s_now >= 0.0) {
            double lo = 0.0, hi = o.chunk;
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const Vec3 am = flow_from(flow, true, o.ode, to_vec(y_prev), mid);
                (section(am) < 0.0 ? lo : hi) = mid;
            }
            const double tau = t_prev + 0.5 * (lo + hi);
            const Vec3 back = flow_from(flow, true, o.ode, to_vec(y_prev), 0.5 * (lo + hi));
            if (shape_space_distance(back, a0) > 1e-7)
                throw Error(ErrorCode::NoClosure, "trajectory crossed the seed section away from the seed");
            return tau;
        }
    }
    throw Error(ErrorCode::NoClosure, "no return to the seed within the time budget");
}

}  // namespace detail

/// Zero-B contour through seed, traversed so that the geometric phase is positive,
/// with t = 0 on the z5-mirror symmetry curve at its crossing of smaller psi5.
inline ParametrizedLoop trace_zero_contour(const AlphaPoint& seed, LoopLabel label = LoopLabel::Unlabelled,
                                           const TraceOptions& opts = {}) {
    const TorusPoint sp = seed;
    if (std::abs(magnetic_B(sp)) > 1e-10 || std::abs(constraint_C(sp)) > 1e-10)
        throw Error(ErrorCode::InvalidInput, "seed must satisfy |B| < 1e-10 and |C| < 1e-10");
    if (opts.samples < 2) throw Error(ErrorCode::InvalidInput, "sample count must be at least 2");
    const Vec3 a0 = detail::project_to_contour(seed.vec(), true);
    const detail::Flow forward = global_contour_flow(1.0);
    const double tau = detail::find_period(forward, a0, opts);

    // provisional pass from the seed: orientation and time origin
    const std::size_t M = opts.samples;
    auto pts = std::make_shared<const std::vector<Vec3>>(detail::flow_samples(forward, true, opts.ode, a0, tau, M));
    double rate_sum = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const TorusPoint p = TorusPoint::from((*pts)[i]);
        rate_sum += theta_dot(p, forward((*pts)[i]));
    }
    const double sign = rate_sum > 0.0 ? 1.0 : -1.0;

    const auto ev = detail::flow_evaluator(forward, true, opts.ode, pts, tau, true);
    auto defect = [&](double t) { return mirror_defect(alpha_to_psi(TorusPoint::from(ev(t).alpha), 1e-8), 5); };
    std::optional<Vec3> origin;
    double best_psi5 = 0.0;
    const double h = tau / static_cast<double>(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double g0 = defect(static_cast<double>(i) * h).second;
        const double g1 = defect(static_cast<double>(i + 1) * h).second;
        if (!((g0 < 0.0) != (g1 < 0.0)) || std::abs(g0 - g1) > pi) continue;
        double lo = static_cast<double>(i) * h, hi = lo + h;
        for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((defect(mid).second < 0.0) == (g0 < 0.0) ? lo : hi) = mid;
        }
        const double tc = 0.5 * (lo + hi);
        const auto d = defect(tc);
        if (std::abs(d.first) > 1e-6) continue;  // psi2 = psi3 alone is not the mirror curve
        const Vec3 a = ev(tc).alpha;
        const double psi5 = alpha_to_psi(TorusPoint::from(a), 1e-8).psi[4];
        if (!origin || psi5 < best_psi5) {
            origin = a;
            best_psi5 = psi5;
        }
    }
    if (!origin) throw Error(ErrorCode::NoCrossing, "loop does not cross the z5 mirror curve");

    const detail::Flow flow = global_contour_flow(sign);
    auto final_pts =
        std::make_shared<const std::vector<Vec3>>(detail::flow_samples(flow, true, opts.ode, *origin, tau, M));
    auto samples = detail::flow_loop_samples(flow, *final_pts, tau);
    auto evaluator = detail::flow_evaluator(flow, true, opts.ode, final_pts, tau, true);
    ParametrizedLoop loop(label, tau, static_cast<int>(sign), std::move(samples), std::move(evaluator), {}, true, true);
    const LoopResiduals r = loop.residuals();
    if (r.closure > 1e-7) throw Error(ErrorCode::NoClosure, "traced loop does not close");
    if (r.max_C > 1e-8) throw Error(ErrorCode::DriftExceeded, "constraint drift along the loop");
    return loop;
}

/// Regular shapes enclosed by the two documented loops.
inline AlphaPoint positive_pentagram() { return psi_to_alpha(regular_shape(pi / 5.0)); }
inline AlphaPoint positive_pentagon() { return psi_to_alpha(regular_shape(3.0 * pi / 5.0)); }

inline ParametrizedLoop pentagram_loop(const TraceOptions& opts = {}) {
    return trace_zero_contour(seed_zero_B(positive_pentagram(), {1.0, 0.3}), LoopLabel::Pentagram, opts);
}

inline ParametrizedLoop pentagon_loop(const TraceOptions& opts = {}) {
    return trace_zero_contour(seed_zero_B(positive_pentagon(), {1.0, 0.3}), LoopLabel::Pentagon, opts);
}

// ---------------------------------------------------------------------------
// Local chart tracer

enum class ChartExitPolicy { Throw, Truncate };

inline constexpr double chart_guard = 1e-2;

/// Traces the contour through seed in the (alpha1, alpha2) chart containing it, with
/// alpha3 lifted from the constraint, for up to max_time.
inline ParametrizedLoop trace_local_chart(const AlphaPoint& seed, double max_time, std::size_t samples = 2048,
                                          ChartExitPolicy policy = ChartExitPolicy::Throw,
                                          const OdeOptions& ode = {}) {
    const TorusPoint sp = seed;
    if (std::abs(magnetic_B(sp)) > 1e-10 || std::abs(constraint_C(sp)) > 1e-10)
        throw Error(ErrorCode::InvalidInput, "seed must satisfy |B| < 1e-10 and |C| < 1e-10");
    if (samples < 2 || !(max_time > 0.0)) throw Error(ErrorCode::InvalidInput, "invalid chart trace extent");
    const double branch = std::sin(sp.alpha3) >= 0.0 ? 1.0 : -1.0;
    const double a3_base = sp.alpha3 - branch * safe_acos(std::cos(sp.alpha3));

    auto lift = [branch, a3_base](double a1, double a2) -> Vec3 {
        const Alpha3Lift l = alpha3_lift(a1, a2);
        if (!l.ok()) throw Error(ErrorCode::ChartExit, "chart lift undefined");
        return {a1, a2, a3_base + branch * l.value};
    };
    auto guard = [](const Vec3& a) {
        const TorusPoint p = TorusPoint::from(a);
        return std::abs(grad_C(p)[2]) < chart_guard;
    };
    // alpha1' = -C3 dH/dalpha2, alpha2' = C3 dH/dalpha1 with H restricted to the chart
    auto chart_rhs = [lift](double, const OdeState<2>& y) {
        const Vec3 a = lift(y[0], y[1]);
        const TorusPoint p = TorusPoint::from(a);
        const Vec3 gc = grad_C(p), gh = grad_contour_hamiltonian(p);
        const double dh1 = gh[0] - gh[2] * gc[0] / gc[2];
        const double dh2 = gh[1] - gh[2] * gc[1] / gc[2];
        return OdeState<2>{-gc[2] * dh2, gc[2] * dh1};
    };
    auto full_velocity = [](const Vec3& a) {
        const TorusPoint p = TorusPoint::from(a);
        const Vec3 gc = grad_C(p), gh = grad_contour_hamiltonian(p);
        const double dh1 = gh[0] - gh[2] * gc[0] / gc[2];
        const double dh2 = gh[1] - gh[2] * gc[1] / gc[2];
        const double v1 = -gc[2] * dh2, v2 = gc[2] * dh1;
        return Vec3{v1, v2, -(gc[0] * v1 + gc[1] * v2) / gc[2]};
    };

    if (guard(sp.vec())) throw Error(ErrorCode::ChartExit, "seed is at the chart gluing");
    DormandPrince<2> dp(chart_rhs, ode);
    const double h = max_time / static_cast<double>(samples);
    std::vector<Vec3> pts{lift(sp.alpha1, sp.alpha2)};
    OdeState<2> y{sp.alpha1, sp.alpha2};
    for (std::size_t i = 1; i <= samples; ++i) {
        const OdeState<2> yn = dp.advance(h * static_cast<double>(i - 1), h * static_cast<double>(i), y);
        const Vec3 a = lift(yn[0], yn[1]);
        if (guard(a)) {
            if (policy == ChartExitPolicy::Throw) throw Error(ErrorCode::ChartExit, "trajectory reached the chart gluing");
            break;
        }
        y = yn;
        pts.push_back(a);
    }
    if (pts.size() < 3) throw Error(ErrorCode::ChartExit, "trajectory leaves the chart immediately");
    const double T = h * static_cast<double>(pts.size() - 1);
    auto shared = std::make_shared<const std::vector<Vec3>>(std::move(pts));
    ParametrizedLoop::Evaluator ev = [shared, lift, chart_rhs, full_velocity, ode = detail::fine_hop_options(ode),
                                      h](double t) {
        const std::size_t M = shared->size() - 1;
        const long idx = std::clamp(std::lround(t / h), 0L, static_cast<long>(M));
        const Vec3& a0 = (*shared)[static_cast<std::size_t>(idx)];
        const double t0 = static_cast<double>(idx) * h;
        Vec3 a = a0;
        if (std::abs(t - t0) > 1e-15) {
            DormandPrince<2> local(chart_rhs, ode);
            const OdeState<2> yn = local.advance(t0, t, {a0[0], a0[1]});
            a = lift(yn[0], yn[1]);
        }
        return LoopState{a, full_velocity(a)};
    };
    std::vector<LoopSample> out;
    for (std::size_t i = 0; i < shared->size(); ++i)
        out.push_back(ParametrizedLoop::make_sample(h * static_cast<double>(i), {(*shared)[i], full_velocity((*shared)[i])}));
    return ParametrizedLoop(LoopLabel::Unlabelled, T, 1, std::move(out), std::move(ev), {}, false, true);
}

/// Hausdorff distance between the sampled point sets of two curves, with each
/// nearest-point search refined on the other curve's evaluator.
inline double hausdorff_distance(const ParametrizedLoop& a, const ParametrizedLoop& b) {
    auto one_sided = [](const ParametrizedLoop& from, const ParametrizedLoop& to) {
        const auto& ts = to.samples();
        const double h = ts[1].t - ts[0].t;
        double worst = 0.0;
        for (const LoopSample& s : from.samples()) {
            std::size_t best = 0;
            double bd = 1e300;
            for (std::size_t j = 0; j < ts.size(); ++j) {
                const double d = shape_space_distance(s.alpha, ts[j].alpha);
                if (d < bd) {
                    bd = d;
                    best = j;
                }
            }
            double lo = std::max(ts.front().t, ts[best].t - h), hi = std::min(ts.back().t, ts[best].t + h);
            if (to.closed()) {
                lo = ts[best].t - h;
                hi = ts[best].t + h;
            }
            auto dist = [&](double t) { return shape_space_distance(s.alpha, to.state(t).alpha); };
            const double g = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
            double f1 = dist(x1), f2 = dist(x2);
            for (int it = 0; it < 60; ++it) {
                if (f1 < f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - g * (hi - lo);
                    f1 = dist(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + g * (hi - lo);
                    f2 = dist(x2);
                }
            }
            worst = std::max(worst, std::min({bd, f1, f2}));
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

// ---------------------------------------------------------------------------
// Convex boundary loop

/// End of the boundary segment parameter: arccos(3 sqrt3 / (4 sqrt2)).
inline const double convex_p_s = std::acos(3.0 * std::sqrt(3.0) / (4.0 * std::sqrt(2.0)));

namespace detail {

inline void check_convex_parameter(double t) {
    if (!(std::abs(t) <= convex_p_s + 1e-14))
        throw Error(ErrorCode::DomainError, "convex boundary parameter outside [-p_s, p_s]");
}

inline double convex_chi(double t) {
    const double c = std::cos(t);
    return -c + std::sqrt(std::max(0.0, c * c - 0.75));
}

/// Raw p(t) and its derivative.
inline LoopState convex_segment_state(double t) {
    const double c = std::cos(t), s = std::sin(t);
    const double root = std::sqrt(std::max(0.0, c * c - 0.75));
    const double chi = -c + root;
    const double chi_dot = s - c * s / root;
    const double a = std::acos(chi);
    const double a_dot = -chi_dot / std::sqrt(1.0 - chi * chi);
    return {{a, a, -t}, {a_dot, a_dot, -1.0}};
}

/// Image under R^r of a state (position through psi, velocity by the chain rule).
inline LoopState rotate_state(int r, const LoopState& s) {
    if (r % 5 == 0) return s;
    const Vec3 q = psi234_from_alpha(s.alpha);
    const Vec3& v = s.alpha_dot;
    // linear part of the inverse affine map
    const double d2 = -v[1] - v[2], d3 = -v[0] + v[1], d4 = -v[1] + v[2];
    const ClosingAngles rates = closing_angle_rates(q[0], q[1], q[2], d2, d3, d4);
    const std::array<double, 5> rate{rates.psi1, d2, d3, d4, rates.psi5};
    std::array<double, 5> rot{};
    for (int i = 0; i < 5; ++i) rot[static_cast<std::size_t>(i)] = rate[static_cast<std::size_t>((i + r) % 5)];
    const Vec3 vel{-0.5 * rot[1] - rot[2] - 0.5 * rot[3], -0.5 * rot[1] - 0.5 * rot[3], -0.5 * rot[1] + 0.5 * rot[3]};
    return {rotate_alpha_raw(r, s.alpha), vel};
}

}  // namespace detail

/// The boundary curve p(t) = (arccos chi, arccos chi, -t) of the convex region.
inline AlphaPoint convex_boundary_point(double t) {
    detail::check_convex_parameter(t);
    const double a = std::acos(detail::convex_chi(t));
    return AlphaPoint::normalized({a, a, -t});
}

/// Five images of p under the powers of R chained into one clockwise loop.
/// t = 0 is the trapezium p(0); corners sit at the odd multiples of p_s.
inline ParametrizedLoop convex_boundary_loop(std::size_t M = 4100) {
    const double ps = convex_p_s;
    // segment k runs over [(2k-1) ps, (2k+1) ps] and carries R^(3k)
    struct Segment {
        int r;
        Vec3 mid;
    };
    auto segment_raw = [](int r, double local) {
        return detail::rotate_state(r, detail::convex_segment_state(local));
    };
    auto segs = std::make_shared<std::vector<Segment>>();
    Vec3 prev_end{};
    for (int k = 0; k <= 5; ++k) {
        const int r = (3 * k) % 5;
        Vec3 mid = segment_raw(r, 0.0).alpha;
        if (k > 0) {
            const Vec3 start = segment_raw(r, -ps).alpha;
            const Vec3 start_cont = prev_end + lattice_reduce(start - prev_end);
            mid = start_cont + lattice_reduce(mid - start_cont);
        }
        const Vec3 end = segment_raw(r, ps).alpha;
        prev_end = mid + lattice_reduce(end - mid);
        segs->push_back({r, mid});
    }
    const double tau = 10.0 * ps;
    ParametrizedLoop::Evaluator ev = [segs, ps, tau, segment_raw](double t) {
        const double k_period = std::floor(t / tau);
        t -= k_period * tau;
        int k = static_cast<int>(std::floor((t + ps) / (2.0 * ps)));
        k = std::clamp(k, 0, 5);
        const double local = std::clamp(t - 2.0 * ps * k, -ps, ps);
        const Segment& seg = (*segs)[static_cast<std::size_t>(k)];
        LoopState s = segment_raw(seg.r, local);
        s.alpha = seg.mid + lattice_reduce(s.alpha - seg.mid);
        const Vec3 loop_shift = (*segs)[5].mid - (*segs)[0].mid;
        s.alpha = s.alpha + k_period * loop_shift;
        return s;
    };
    std::vector<double> corners;
    for (int k = 0; k < 5; ++k) corners.push_back((2.0 * k + 1.0) * ps);
    return ParametrizedLoop::from_evaluator(LoopLabel::ConvexBoundary, tau, -1, std::move(ev), M,
                                            std::move(corners), true, false);
}

/// Weak convexity: all angles of one sign (psi = +-pi allowed on either side) with angle sum +-3 pi.
inline bool is_convex(const PsiShape& s) {
    const double eps = 1e-12;
    bool pos = true, neg = true;
    for (double x : s.psi) {
        const bool is_pi = std::abs(std::abs(x) - pi) < eps;
        if (!(x >= -eps || is_pi)) pos = false;
        if (!(x <= eps || is_pi)) neg = false;
    }
    double pos_sum = 0.0, neg_sum = 0.0;
    for (double x : s.psi) {
        const bool is_pi = std::abs(std::abs(x) - pi) < eps;
        pos_sum += is_pi ? pi : x;
        neg_sum += is_pi ? -pi : x;
    }
    return (pos && std::abs(pos_sum - 3.0 * pi) < 1e-8) || (neg && std::abs(neg_sum + 3.0 * pi) < 1e-8);
}

}  // namespace pentagon
