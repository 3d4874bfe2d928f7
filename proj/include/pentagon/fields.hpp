#pragma once

// Scalar fields on shape space in alpha coordinates: moment of inertia,
// angular-momentum coefficients, orientation rate, constraint gradient and
// the magnetic field B = (curl F) . grad C.

#include <pentagon/symmetry.hpp>

#include <algorithm>
#include <array>
#include <string>
#include <vector>

namespace pentagon {

using Mat3 = std::array<Vec3, 3>;

inline const double inertia_min = (5.0 - std::sqrt(5.0)) / 2.0;
inline const double inertia_saddle = 2.5;
inline const double inertia_max = (5.0 + std::sqrt(5.0)) / 2.0;

inline double inertia(const TorusPoint& p) {
    const double c1 = std::cos(p.alpha1), c2 = std::cos(p.alpha2), c3 = std::cos(p.alpha3);
    const double s1 = std::sin(p.alpha1), s2 = std::sin(p.alpha2);
    return 4.0 + 2.0 * c1 * c2 + 1.6 * c1 * c3 + 2.4 * c2 * c3 + 1.2 * s1 * s2;
}

inline Vec3 grad_inertia(const TorusPoint& p) {
    const double c1 = std::cos(p.alpha1), c2 = std::cos(p.alpha2), c3 = std::cos(p.alpha3);
    const double s1 = std::sin(p.alpha1), s2 = std::sin(p.alpha2), s3 = std::sin(p.alpha3);
    return {-2.0 * s1 * c2 - 1.6 * s1 * c3 + 1.2 * c1 * s2, -2.0 * c1 * s2 - 2.4 * s2 * c3 + 1.2 * s1 * c2,
            -1.6 * c1 * s3 - 2.4 * c2 * s3};
}

inline Mat3 hessian_inertia(const TorusPoint& p) {
    const double c1 = std::cos(p.alpha1), c2 = std::cos(p.alpha2), c3 = std::cos(p.alpha3);
    const double s1 = std::sin(p.alpha1), s2 = std::sin(p.alpha2), s3 = std::sin(p.alpha3);
    const double h11 = -2.0 * c1 * c2 - 1.6 * c1 * c3 - 1.2 * s1 * s2;
    const double h12 = 2.0 * s1 * s2 + 1.2 * c1 * c2;
    const double h13 = 1.6 * s1 * s3;
    const double h22 = -2.0 * c1 * c2 - 2.4 * c2 * c3 - 1.2 * s1 * s2;
    const double h23 = 2.4 * s2 * s3;
    const double h33 = -1.6 * c1 * c3 - 2.4 * c2 * c3;
    return {{{h11, h12, h13}, {h12, h22, h23}, {h13, h23, h33}}};
}

inline Vec3 grad_C(const TorusPoint& p) {
    const double c1 = std::cos(p.alpha1), c2 = std::cos(p.alpha2), c3 = std::cos(p.alpha3);
    return {-4.0 * std::sin(p.alpha1) * (c2 + c3), -4.0 * std::sin(p.alpha2) * (c1 + c3),
            -4.0 * std::sin(p.alpha3) * (c1 + c2)};
}

inline Mat3 hessian_C(const TorusPoint& p) {
    const double c1 = std::cos(p.alpha1), c2 = std::cos(p.alpha2), c3 = std::cos(p.alpha3);
    const double s1 = std::sin(p.alpha1), s2 = std::sin(p.alpha2), s3 = std::sin(p.alpha3);
    return {{{-4.0 * c1 * (c2 + c3), 4.0 * s1 * s2, 4.0 * s1 * s3},
             {4.0 * s1 * s2, -4.0 * c2 * (c1 + c3), 4.0 * s2 * s3},
             {4.0 * s1 * s3, 4.0 * s2 * s3, -4.0 * c3 * (c1 + c2)}}};
}

/// Moment of inertia and the coefficients of L = I thetadot + sum F~_j alphadot_j.
struct AngMomCoefficients {
    double inertia;
    double f1, f2, f3;

    Vec3 f() const { return {f1, f2, f3}; }
};

inline AngMomCoefficients angmom_coefficients(const TorusPoint& p) {
    const double c1 = std::cos(p.alpha1), c2 = std::cos(p.alpha2), c3 = std::cos(p.alpha3);
    const double s1 = std::sin(p.alpha1), s2 = std::sin(p.alpha2), s3 = std::sin(p.alpha3);
    const double common = 2.0 + c1 * c2 + 0.8 * c1 * c3 + 1.2 * c2 * c3 + 0.6 * s1 * s2;
    return {inertia(p), common + 1.2 * s2 * s3, common + 0.8 * s1 * s3,
            2.4 + 1.6 * c1 * c2 + 0.8 * c1 * c3 + 1.2 * c2 * c3 + 1.6 * s1 * s2};
}

/// The connection one-form F_j = -F~_j / I, so that thetadot = L/I + F . alphadot.
inline Vec3 connection_F(const TorusPoint& p) {
    const AngMomCoefficients k = angmom_coefficients(p);
    return {-k.f1 / k.inertia, -k.f2 / k.inertia, -k.f3 / k.inertia};
}

inline double theta_dot(const TorusPoint& p, const Vec3& alpha_dot, double angular_momentum = 0.0) {
    const AngMomCoefficients k = angmom_coefficients(p);
    return angular_momentum / k.inertia - dot(k.f(), alpha_dot) / k.inertia;
}

/// The trigonometric polynomial (5/8) I^2 B.
inline double magnetic_numerator(const TorusPoint& p) {
    const double a1 = p.alpha1, a2 = p.alpha2, a3 = p.alpha3;
    const double c1 = std::cos(a1), c2 = std::cos(a2);
    return std::cos(3.0 * a3) * (c1 + c2) +
           std::cos(2.0 * a3) * (3.0 + 2.0 * std::cos(a1 - a2) + std::cos(a1 + a2)) +
           std::cos(a3) * (c1 + c2 - std::cos(3.0 * a2) - std::cos(2.0 * a1 - a2) - 2.0 * std::cos(a1 + 2.0 * a2)) +
           std::sin(a1) * std::sin(a2) - c1 * (2.0 * c2 + std::cos(3.0 * a2)) - std::cos(2.0 * a1) -
           2.0 * std::cos(2.0 * a2);
}

inline Vec3 grad_magnetic_numerator(const TorusPoint& p) {
    const double a1 = p.alpha1, a2 = p.alpha2, a3 = p.alpha3;
    const double c1 = std::cos(a1), c2 = std::cos(a2), s1 = std::sin(a1), s2 = std::sin(a2);
    const double k3 = std::cos(3.0 * a3), k2 = std::cos(2.0 * a3), k1 = std::cos(a3);
    const double d1 = -k3 * s1 + k2 * (-2.0 * std::sin(a1 - a2) - std::sin(a1 + a2)) +
                      k1 * (-s1 + 2.0 * std::sin(2.0 * a1 - a2) + 2.0 * std::sin(a1 + 2.0 * a2)) + c1 * s2 +
                      s1 * (2.0 * c2 + std::cos(3.0 * a2)) + 2.0 * std::sin(2.0 * a1);
    const double d2 = -k3 * s2 + k2 * (2.0 * std::sin(a1 - a2) - std::sin(a1 + a2)) +
                      k1 * (-s2 + 3.0 * std::sin(3.0 * a2) - std::sin(2.0 * a1 - a2) + 4.0 * std::sin(a1 + 2.0 * a2)) +
                      s1 * c2 + c1 * (2.0 * s2 + 3.0 * std::sin(3.0 * a2)) + 4.0 * std::sin(2.0 * a2);
    const double d3 = -3.0 * std::sin(3.0 * a3) * (c1 + c2) -
                      2.0 * std::sin(2.0 * a3) * (3.0 + 2.0 * std::cos(a1 - a2) + std::cos(a1 + a2)) -
                      std::sin(a3) * (c1 + c2 - std::cos(3.0 * a2) - std::cos(2.0 * a1 - a2) - 2.0 * std::cos(a1 + 2.0 * a2));
    return {d1, d2, d3};
}

inline double magnetic_B(const TorusPoint& p) {
    const double i = inertia(p);
    return 1.6 * magnetic_numerator(p) / (i * i);
}

/// H = B I^2, the Hamiltonian whose flow parametrizes the B = 0 contours.
inline double contour_hamiltonian(const TorusPoint& p) { return 1.6 * magnetic_numerator(p); }

inline Vec3 grad_contour_hamiltonian(const TorusPoint& p) { return 1.6 * grad_magnetic_numerator(p); }

/// Velocity of the global contour flow alphadot = grad C x grad H.
inline Vec3 contour_velocity(const TorusPoint& p) { return cross(grad_C(p), grad_contour_hamiltonian(p)); }

// ---------------------------------------------------------------------------
// Critical points of the moment of inertia

enum class CriticalType { Min, Saddle, Max };

inline const char* to_string(CriticalType t) {
    switch (t) {
        case CriticalType::Min: return "min";
        case CriticalType::Saddle: return "saddle";
        case CriticalType::Max: return "max";
    }
    return "?";
}

struct CriticalPoint {
    AlphaPoint point;
    Vec3 representative;  // un-normalized coordinates the solver converged to
    double value;
    CriticalType type;
};

namespace detail {

/// Solves the 4x4 system m x = rhs by Gaussian elimination with partial pivoting.
inline std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> m, std::array<double, 4> rhs) {
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        std::swap(rhs[c], rhs[piv]);
        if (std::abs(m[c][c]) < 1e-300) throw Error(ErrorCode::ConvergenceFailure, "singular Lagrange system");
        for (int r = c + 1; r < 4; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    std::array<double, 4> x{};
    for (int r = 3; r >= 0; --r) {
        double s = rhs[r];
        for (int k = r + 1; k < 4; ++k) s -= m[r][k] * x[k];
        x[r] = s / m[r][r];
    }
    return x;
}

/// Orthonormal basis of the plane orthogonal to n.
inline std::array<Vec3, 2> tangent_basis(const Vec3& n) {
    const Vec3 unit = (1.0 / norm(n)) * n;
    Vec3 e = std::abs(unit[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
    e = e - dot(e, unit) * unit;
    const Vec3 u = (1.0 / norm(e)) * e;
    return {u, cross(unit, u)};
}

}  // namespace detail

/// Newton iteration on grad I = lambda grad C, C = 0 from a seed.
inline CriticalPoint refine_inertia_critical_point(const Vec3& seed) {
    Vec3 a = seed;
    const TorusPoint s0 = TorusPoint::from(a);
    const Vec3 gc0 = grad_C(s0);
    const double gc0n = dot(gc0, gc0);
    double lambda = gc0n > 0.0 ? dot(grad_inertia(s0), gc0) / gc0n : 0.0;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        const TorusPoint p = TorusPoint::from(a);
        const Vec3 gi = grad_inertia(p), gc = grad_C(p);
        const Mat3 hi = hessian_inertia(p), hc = hessian_C(p);
        std::array<double, 4> res{gi[0] - lambda * gc[0], gi[1] - lambda * gc[1], gi[2] - lambda * gc[2],
                                  constraint_C(p)};
        double rn = 0.0;
        for (double r : res) rn = std::max(rn, std::abs(r));
        if (rn < 1e-14) {
            converged = true;
            break;
        }
        std::array<std::array<double, 4>, 4> jac{};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) jac[r][c] = hi[r][c] - lambda * hc[r][c];
            jac[r][3] = -gc[r];
            jac[3][r] = gc[r];
        }
        for (double& r : res) r = -r;
        const auto dx = detail::solve4(jac, res);
        a = a + Vec3{dx[0], dx[1], dx[2]};
        lambda += dx[3];
    }
    if (!converged) {
        const TorusPoint p = TorusPoint::from(a);
        const Vec3 r = grad_inertia(p) - lambda * grad_C(p);
        if (norm(r) > 1e-12 || std::abs(constraint_C(p)) > 1e-12)
            throw Error(ErrorCode::ConvergenceFailure, "critical point solver did not converge");
    }
    const TorusPoint p = TorusPoint::from(a);
    // Hessian of the Lagrangian restricted to the tangent plane.
    const Mat3 hi = hessian_inertia(p), hc = hessian_C(p);
    Mat3 hl{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) hl[r][c] = hi[r][c] - lambda * hc[r][c];
    const auto [u, v] = detail::tangent_basis(grad_C(p));
    auto quad = [&](const Vec3& x, const Vec3& y) {
        double s = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) s += x[r] * hl[r][c] * y[c];
        return s;
    };
    const double huu = quad(u, u), huv = quad(u, v), hvv = quad(v, v);
    const double det = huu * hvv - huv * huv;
    CriticalType type = CriticalType::Saddle;
    if (det > 0.0) type = huu > 0.0 ? CriticalType::Min : CriticalType::Max;
    return {AlphaPoint::normalized(p), a, inertia(p), type};
}

/// Locations of the critical points inside phi: the four corners and the interior saddle.
inline std::vector<Vec3> inertia_critical_seeds() {
    const double kappa = std::acos(7.0 / 8.0);
    return {{3.0 * pi / 5.0, -pi / 5.0, pi},
            {-3.0 * pi / 5.0, pi / 5.0, -pi},
            {pi / 5.0, 3.0 * pi / 5.0, pi},
            {-pi / 5.0, -3.0 * pi / 5.0, -pi},
            {0.0, 0.0, pi - kappa}};
}

struct CriticalStructure {
    std::vector<CriticalPoint> points;
    int minima = 0;
    int saddles = 0;
    int maxima = 0;

    int euler_characteristic() const { return minima - saddles + maxima; }
};

/// All critical points of I on the full surface, generated from phi by the D10 action.
inline CriticalStructure inertia_critical_points() {
    CriticalStructure out;
    for (const Vec3& seed : inertia_critical_seeds()) {
        const CriticalPoint base = refine_inertia_critical_point(seed);
        for (const GroupElement& g : group_elements(SymmetryGroup::D10)) {
            const AlphaPoint img = act_alpha(g, base.point);
            const bool seen = std::any_of(out.points.begin(), out.points.end(), [&](const CriticalPoint& c) {
                return shape_space_distance(c.point.vec(), img.vec()) < 1e-9;
            });
            if (seen) continue;
            // re-polish each image so values are exact to roundoff
            CriticalPoint cp = refine_inertia_critical_point(img.vec());
            cp.type = base.type;
            out.points.push_back(cp);
        }
    }
    for (const CriticalPoint& c : out.points) {
        if (c.type == CriticalType::Min) ++out.minima;
        if (c.type == CriticalType::Saddle) ++out.saddles;
        if (c.type == CriticalType::Max) ++out.maxima;
    }
    return out;
}

}  // namespace pentagon
