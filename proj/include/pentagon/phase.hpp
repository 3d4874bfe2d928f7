#pragma once

// Geometric phase of closed loops, small-disc Stokes checks, reconstruction of
// the zero-momentum motion and Fourier analysis of psi5 and thetadot.

#include <pentagon/contour.hpp>

#include <complex>
#include <vector>

namespace pentagon {

namespace detail {

/// 16-point Gauss-Legendre nodes and weights on [-1, 1].
inline const std::array<std::pair<double, double>, 16>& gauss_legendre16() {
    static const std::array<std::pair<double, double>, 16> table = [] {
        std::array<std::pair<double, double>, 16> out{};
        const int n = 16;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(pi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            out[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        return out;
    }();
    return table;
}

template <class F>
double gauss_legendre(const F& f, double a, double b, int panels) {
    double sum = 0.0;
    const double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        for (const auto& [x, wt] : gauss_legendre16()) sum += wt * f(lo + 0.5 * w * (x + 1.0));
    }
    return 0.5 * w * sum;
}

inline double rate_at(const LoopState& s) { return theta_dot(TorusPoint::from(s.alpha), s.alpha_dot); }

}  // namespace detail

enum class PhaseMethod { LineIntegral, Stokes };

struct PhaseReport {
    double delta_theta = 0.0;
    double tau = 0.0;
    PhaseMethod method = PhaseMethod::LineIntegral;
    double max_C = 0.0;
    double max_B = 0.0;
    double angular_momentum = 0.0;  // max |L| of the reconstructed motion, when evaluated
    double closure = 0.0;
};

/// Integral of F . dalpha over [t0, t1] of a curve, by Gauss-Legendre panels on its evaluator.
inline double phase_integral(const ParametrizedLoop& loop, double t0, double t1, int panels = 64) {
    return detail::gauss_legendre([&](double t) { return detail::rate_at(loop.state(t)); }, t0, t1, panels);
}

inline void require_closed(const ParametrizedLoop& loop) {
    if (!loop.closed() || loop.residuals().closure > 1e-7) throw Error(ErrorCode::OpenLoop, "loop is not closed");
}

/// Delta theta = closed integral of F . dalpha (zero angular momentum).
inline PhaseReport geometric_phase(const ParametrizedLoop& loop) {
    require_closed(loop);
    const LoopResiduals r = loop.residuals();
    PhaseReport rep;
    rep.tau = loop.tau();
    rep.max_C = r.max_C;
    rep.max_B = r.max_B;
    rep.closure = r.closure;
    const auto& s = loop.samples();
    if (loop.breakpoints().empty()) {
        // periodic trapezoid on the uniform samples
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            sum += theta_dot(TorusPoint::from(s[i].alpha), s[i].alpha_dot);
        rep.delta_theta = sum * loop.tau() / static_cast<double>(s.size() - 1);
        return rep;
    }
    std::vector<double> edges{0.0};
    for (double b : loop.breakpoints())
        if (b > 0.0 && b < loop.tau()) edges.push_back(b);
    edges.push_back(loop.tau());
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) rep.delta_theta += phase_integral(loop, edges[i], edges[i + 1], 16);
    return rep;
}

// ---------------------------------------------------------------------------
// Small discs in an (alpha1, alpha2) chart

namespace detail {

struct ChartLift {
    double branch;
    double base;

    Vec3 operator()(double a1, double a2) const {
        const Alpha3Lift l = alpha3_lift(a1, a2);
        if (!l.ok()) throw Error(ErrorCode::ChartError, "disc leaves the chart");
        const Vec3 a{a1, a2, base + branch * l.value};
        if (std::abs(grad_C(TorusPoint::from(a))[2]) < chart_guard)
            throw Error(ErrorCode::ChartError, "disc reaches the chart gluing");
        return a;
    }
};

inline ChartLift chart_of(const AlphaPoint& center) {
    const TorusPoint c = center;
    if (std::abs(grad_C(c)[2]) < chart_guard) throw Error(ErrorCode::ChartError, "center is at the chart gluing");
    const double branch = std::sin(c.alpha3) >= 0.0 ? 1.0 : -1.0;
    return {branch, c.alpha3 - branch * safe_acos(std::cos(c.alpha3))};
}

}  // namespace detail

/// The Stokes integrand B / C3 in the (alpha1, alpha2) chart.
inline double stokes_integrand(const TorusPoint& p) { return magnetic_B(p) / grad_C(p)[2]; }

/// Surface integral of B / C3 over the coordinate disc of the given radius.
inline double stokes_phase_small_loop(const AlphaPoint& center, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidInput, "radius must be positive");
    const detail::ChartLift lift = detail::chart_of(center);
    const double c1 = center.alpha1(), c2 = center.alpha2();
    const int n_phi = 64;
    double total = 0.0;
    for (int k = 0; k < n_phi; ++k) {
        const double phi = two_pi * k / n_phi;
        total += detail::gauss_legendre(
            [&](double r) {
                const Vec3 a = lift(c1 + r * std::cos(phi), c2 + r * std::sin(phi));
                return r * stokes_integrand(TorusPoint::from(a));
            },
            0.0, radius, 1);
    }
    return total * two_pi / n_phi;
}

/// Line integral of F . dalpha counterclockwise around the same coordinate circle.
inline double line_phase_small_loop(const AlphaPoint& center, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidInput, "radius must be positive");
    const detail::ChartLift lift = detail::chart_of(center);
    const double c1 = center.alpha1(), c2 = center.alpha2();
    const int n = 256;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        const double phi = two_pi * k / n;
        const Vec3 a = lift(c1 + radius * std::cos(phi), c2 + radius * std::sin(phi));
        const Vec3 gc = grad_C(TorusPoint::from(a));
        const double v1 = -radius * std::sin(phi), v2 = radius * std::cos(phi);
        const Vec3 v{v1, v2, -(gc[0] * v1 + gc[1] * v2) / gc[2]};
        total += theta_dot(TorusPoint::from(a), v);
    }
    return total * two_pi / n;
}

// ---------------------------------------------------------------------------
// Motion reconstruction

struct Trajectory {
    std::vector<double> t;
    std::vector<double> theta;
    std::vector<double> theta_dot;
    std::vector<PsiShape> shapes;
    std::vector<VertexConfig> frames;
};

/// Orientation theta at t by integrating thetadot from a sample time.
inline double theta_at(const ParametrizedLoop& loop, double t_from, double theta_from, double t) {
    if (t == t_from) return theta_from;
    return theta_from + phase_integral(loop, t_from, t, 1);
}

/// Zero-momentum motion along the loop: theta integrated sample to sample and vertices from the shapes.
inline Trajectory reconstruct_motion(const ParametrizedLoop& loop, double theta0) {
    require_closed(loop);
    Trajectory tr;
    const auto& s = loop.samples();
    double theta = theta0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0) theta = theta_at(loop, s[i - 1].t, theta, s[i].t);
        tr.t.push_back(s[i].t);
        tr.theta.push_back(theta);
        tr.theta_dot.push_back(theta_dot(TorusPoint::from(s[i].alpha), s[i].alpha_dot));
        tr.shapes.push_back(s[i].psi);
        tr.frames.push_back(vertices_from_shape(s[i].psi, theta));
    }
    return tr;
}

/// Angular momentum sum Im(conj z_i dz_i/dt) of the reconstructed motion, with vertex
/// velocities from central differences of step delta.
inline double angular_momentum_fd(const ParametrizedLoop& loop, double t, double theta, double delta = 1e-6) {
    auto frame = [&](double dt) {
        const LoopState st = loop.state(t + dt);
        const PsiShape psi = alpha_to_psi(TorusPoint::from(st.alpha), 1e-8);
        return vertices_from_shape(psi, theta_at(loop, t, theta, t + dt));
    };
    const VertexConfig plus = frame(delta), minus = frame(-delta), mid = frame(0.0);
    double L = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const Complex zdot = (plus.z[i] - minus.z[i]) / (2.0 * delta);
        L += std::imag(std::conj(mid.z[i]) * zdot);
    }
    return L;
}

inline double max_angular_momentum(const ParametrizedLoop& loop, const Trajectory& tr) {
    double m = 0.0;
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        if (std::find(loop.breakpoints().begin(), loop.breakpoints().end(), tr.t[i]) != loop.breakpoints().end())
            continue;  // one-sided velocities at corners
        m = std::max(m, std::abs(angular_momentum_fd(loop, tr.t[i], tr.theta[i])));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Fourier analysis

/// Continuous continuation of a sampled angle.
inline std::vector<double> unwrap(const std::vector<double>& x) {
    std::vector<double> out(x);
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = out[i - 1] + wrap_angle(x[i] - x[i - 1]);
    return out;
}

struct FourierSeries {
    double omega = 0.0;
    std::vector<double> cos_coeffs;  // a_0 .. a_N
    std::vector<double> sin_coeffs;  // b_1 .. b_N
    int N = 0;

    double operator()(double t) const {
        double v = cos_coeffs[0];
        for (int n = 1; n <= N; ++n)
            v += cos_coeffs[static_cast<std::size_t>(n)] * std::cos(n * omega * t) +
                 sin_coeffs[static_cast<std::size_t>(n - 1)] * std::sin(n * omega * t);
        return v;
    }
};

/// Real Fourier coefficients of uniformly sampled periodic data (last sample excluded).
inline FourierSeries fourier_series(const std::vector<double>& values, double tau, int N) {
    if (N < 0) throw Error(ErrorCode::InvalidInput, "truncation must be non-negative");
    const std::size_t M = values.size();
    FourierSeries f;
    f.omega = two_pi / tau;
    f.N = N;
    for (int n = 0; n <= N; ++n) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double x = two_pi * static_cast<double>(n) * static_cast<double>(i) / static_cast<double>(M);
            a += values[i] * std::cos(x);
            b += values[i] * std::sin(x);
        }
        const double scale = n == 0 ? 1.0 / static_cast<double>(M) : 2.0 / static_cast<double>(M);
        f.cos_coeffs.push_back(a * scale);
        if (n > 0) f.sin_coeffs.push_back(b * scale);
    }
    return f;
}

/// Unwrapped samples of psi_i (1-based) on the uniform grid, last sample excluded.
inline std::vector<double> psi_signal(const ParametrizedLoop& loop, int i) {
    std::vector<double> v;
    const auto& s = loop.samples();
    for (std::size_t k = 0; k + 1 < s.size(); ++k) v.push_back(s[k].psi.at(i));
    return unwrap(v);
}

inline constexpr double sine_content_threshold = 1e-6;

/// Cosine series of psi5; the time origin must make psi5 even.
inline FourierSeries fourier_cosine_psi5(const ParametrizedLoop& loop, int N = 14) {
    require_closed(loop);
    FourierSeries f = fourier_series(psi_signal(loop, 5), loop.tau(), N);
    for (double b : f.sin_coeffs)
        if (std::abs(b) > sine_content_threshold)
            throw Error(ErrorCode::PhaseConventionError, "psi5 has sine content; time origin not on the mirror curve");
    return f;
}

inline FourierSeries fourier_theta_dot(const ParametrizedLoop& loop, int N = 10) {
    require_closed(loop);
    std::vector<double> v;
    const auto& s = loop.samples();
    for (std::size_t k = 0; k + 1 < s.size(); ++k) v.push_back(theta_dot(TorusPoint::from(s[k].alpha), s[k].alpha_dot));
    return fourier_series(v, loop.tau(), N);
}

struct AngleSymmetryReport {
    bool harmonics_vanish = false;  // (a) a_5n = 0 and psi5 even
    bool constant_sum = false;      // (b) sum_j psi5(t + j tau/5) = pi
    bool reconstruction = false;    // (c) psi_{5+j} from the sub-series f_l
    double max_a5n = 0.0;
    double max_sine = 0.0;
    double max_sum_error = 0.0;
    double max_reconstruction_error = 0.0;
    int shift = 0;  // psi_{5+j}(t) = psi5(t + j shift tau / 5)

    bool all() const { return harmonics_vanish && constant_sum && reconstruction; }
};

inline AngleSymmetryReport verify_angle_symmetry(const ParametrizedLoop& loop) {
    require_closed(loop);
    AngleSymmetryReport rep;
    const double tau = loop.tau();
    const int n_check = 256;
    const FourierSeries f = fourier_series(psi_signal(loop, 5), tau, n_check);
    for (int n = 5; n <= n_check; n += 5) rep.max_a5n = std::max(rep.max_a5n, std::abs(f.cos_coeffs[static_cast<std::size_t>(n)]));
    for (double b : f.sin_coeffs) rep.max_sine = std::max(rep.max_sine, std::abs(b));
    rep.harmonics_vanish = rep.max_a5n < 1e-6 && rep.max_sine < sine_content_threshold;

    auto psi_at = [&](double t, int i) { return alpha_to_psi(TorusPoint::from(loop.state(t).alpha), 1e-8).at(i); };
    const int n_t = 100;
    for (int k = 0; k < n_t; ++k) {
        const double t = tau * k / n_t;
        double sum = 0.0;
        for (int j = 0; j < 5; ++j) sum += psi_at(t + j * tau / 5.0, 5);
        rep.max_sum_error = std::max(rep.max_sum_error, std::abs(wrap_angle(sum - pi)));
    }
    rep.constant_sum = rep.max_sum_error < 1e-6;

    // f_l(t) = sum_n a_{l+5n} e^{i (l+5n) w t}; psi_{5+j} = Re sum_l f_l e^{2 pi i j l s / 5}
    auto reconstruct = [&](double t, int j, int s) {
        std::complex<double> acc = f.cos_coeffs[0];
        for (int n = 1; n <= n_check; ++n) {
            const int l = n % 5;
            acc += f.cos_coeffs[static_cast<std::size_t>(n)] * std::polar(1.0, n * f.omega * t) *
                   std::polar(1.0, two_pi * j * l * s / 5.0);
        }
        return std::real(acc);
    };
    double best = 1e300;
    for (int s : {1, -1, 2, -2}) {
        double err = 0.0;
        for (int k = 0; k < 20; ++k) {
            const double t = tau * k / 20.0;
            err = std::max(err, std::abs(wrap_angle(reconstruct(t, 1, s) - psi_at(t, 1))));
        }
        if (err < best) {
            best = err;
            rep.shift = s;
        }
    }
    for (int k = 0; k < n_t; ++k) {
        const double t = tau * k / n_t;
        for (int j = 1; j <= 4; ++j)
            rep.max_reconstruction_error =
                std::max(rep.max_reconstruction_error, std::abs(wrap_angle(reconstruct(t, j, rep.shift) - psi_at(t, j))));
    }
    rep.reconstruction = rep.max_reconstruction_error < 1e-5;
    return rep;
}

}  // namespace pentagon
