#pragma once

// Closed-form geometry of the equilateral pentagon: vertex reconstruction,
// relative angles, the alpha-coordinate change and the closure surface C = 0.

#include <pentagon/core.hpp>

#include <algorithm>
#include <array>
#include <complex>
#include <string>

namespace pentagon {

using Complex = std::complex<double>;

/// Principal argument in (-pi, pi]; std::arg can return -pi for a negative-zero imaginary part.
inline double principal_arg(Complex z) {
    double a = std::arg(z);
    return a <= -pi ? pi : a;
}

/// The five relative angles; psi[0] is psi_1. Labelled oriented shape modulo SE(2).
struct PsiShape {
    std::array<double, 5> psi{};

    /// 1-based cyclic access: at(6) == at(1), at(0) == at(5).
    double at(int i) const { return psi[static_cast<std::size_t>(((i - 1) % 5 + 5) % 5)]; }
    double sum() const { return psi[0] + psi[1] + psi[2] + psi[3] + psi[4]; }
};

/// A point of the three-torus of alpha angles (each taken modulo 2 pi).
struct TorusPoint {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;

    Vec3 vec() const { return {alpha1, alpha2, alpha3}; }
    static TorusPoint from(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

// ---------------------------------------------------------------------------
// Equivalence lattice of the alpha coordinates.
//
// Shifts ((i+2j+k) pi, (i+k) pi, (i-k) pi) with integer i, j, k are exactly the
// integer multiples (a, b, c) of pi with a = b = c (mod 2).

/// Residual of d after removing the nearest lattice vector.
inline Vec3 lattice_reduce(const Vec3& d) {
    Vec3 even{}, odd{};
    for (int i = 0; i < 3; ++i) {
        const double x = d[static_cast<std::size_t>(i)] / pi;
        even[static_cast<std::size_t>(i)] = (x - 2.0 * std::round(x / 2.0)) * pi;
        odd[static_cast<std::size_t>(i)] = (x - (2.0 * std::round((x - 1.0) / 2.0) + 1.0)) * pi;
    }
    return dot(even, even) <= dot(odd, odd) ? even : odd;
}

/// Distance between two alpha triples as points of labelled shape space.
inline double shape_space_distance(const Vec3& a, const Vec3& b) { return norm(lattice_reduce(a - b)); }

/// alpha triple normalized to alpha1, alpha2 in (-pi, pi], alpha3 in [0, pi).
inline Vec3 normalize_alpha(Vec3 a) {
    double a3 = std::fmod(a[2], two_pi);
    if (a3 < 0.0) a3 += two_pi;
    if (two_pi - a3 < 1e-13) a3 = 0.0;
    if (a3 >= pi) {
        a[0] -= pi;
        a[1] -= pi;
        a3 -= pi;
    }
    return {wrap_angle(a[0]), wrap_angle(a[1]), a3};
}

/// A point on shape space in the unique normalized representative.
class AlphaPoint {
public:
    AlphaPoint() = default;

    /// Normalizes without checking the constraint.
    static AlphaPoint normalized(const TorusPoint& p) { return AlphaPoint(normalize_alpha(p.vec())); }

    /// Normalizes and requires |C| <= tolerance.
    static AlphaPoint on_surface(const TorusPoint& p, double tolerance = tol::closure);

    double alpha1() const { return a_[0]; }
    double alpha2() const { return a_[1]; }
    double alpha3() const { return a_[2]; }
    const Vec3& vec() const { return a_; }
    TorusPoint torus() const { return TorusPoint::from(a_); }
    operator TorusPoint() const { return torus(); }

private:
    explicit AlphaPoint(const Vec3& a) : a_(a) {}
    Vec3 a_{};
};

/// Orientation plus the five vertices with centroid at the origin.
struct VertexConfig {
    double theta = 0.0;
    std::array<Complex, 5> z{};
};

// ---------------------------------------------------------------------------
// Constraint surface

inline double constraint_C(const TorusPoint& p) {
    const double c1 = std::cos(p.alpha1), c2 = std::cos(p.alpha2), c3 = std::cos(p.alpha3);
    return 3.0 + 4.0 * c1 * c2 + 4.0 * c1 * c3 + 4.0 * c2 * c3;
}

/// Residual of the closure relation in the relative angles (psi2, psi3, psi4).
inline double closure_residual(double psi2, double psi3, double psi4) {
    return 3.0 - 2.0 * std::cos(psi2) - 2.0 * std::cos(psi3) - 2.0 * std::cos(psi4) +
           2.0 * std::cos(psi2 + psi3) + 2.0 * std::cos(psi3 + psi4) - 2.0 * std::cos(psi2 + psi3 + psi4);
}

inline AlphaPoint AlphaPoint::on_surface(const TorusPoint& p, double tolerance) {
    const double c = constraint_C(p);
    if (!(std::abs(c) <= tolerance))
        throw Error(ErrorCode::NotClosed, "constraint residual " + std::to_string(c) + " off the shape surface");
    return normalized(p);
}

// ---------------------------------------------------------------------------
// Vertices and relative angles

/// Vertices for given (psi2, psi3, psi4) and orientation theta, centroid at the origin.
/// The first four edges are unit; the fifth is unit exactly when the closure relation holds.
inline VertexConfig vertices_from_shape(double psi2, double psi3, double psi4, double theta) {
    const Complex rot = std::polar(1.0, theta);
    const Complex e2 = std::polar(1.0, -psi2);
    const Complex e23 = std::polar(1.0, -(psi2 + psi3));
    const Complex e234 = std::polar(1.0, -(psi2 + psi3 + psi4));
    VertexConfig v;
    v.theta = theta;
    v.z[0] = rot * (-4.0 + 3.0 * e2 - 2.0 * e23 + e234) / 5.0;
    v.z[1] = rot * (1.0 + 3.0 * e2 - 2.0 * e23 + e234) / 5.0;
    v.z[2] = rot * (1.0 - 2.0 * e2 - 2.0 * e23 + e234) / 5.0;
    v.z[3] = rot * (1.0 - 2.0 * e2 + 3.0 * e23 + e234) / 5.0;
    v.z[4] = rot * (1.0 - 2.0 * e2 + 3.0 * e23 - 4.0 * e234) / 5.0;
    return v;
}

inline PsiShape psi_from_vertices(const VertexConfig& v) {
    PsiShape s;
    for (int i = 0; i < 5; ++i) {
        const Complex prev = v.z[static_cast<std::size_t>(i)] - v.z[static_cast<std::size_t>((i + 4) % 5)];
        const Complex next = v.z[static_cast<std::size_t>((i + 1) % 5)] - v.z[static_cast<std::size_t>(i)];
        if (std::abs(prev) < tol::degenerate_edge || std::abs(next) < tol::degenerate_edge)
            throw Error(ErrorCode::DegenerateEdge, "edge " + std::to_string(i + 1) + " has zero length");
        s.psi[static_cast<std::size_t>(i)] = wrap_angle(-principal_arg(-next / prev));
    }
    return s;
}

struct ClosingAngles {
    double psi1;
    double psi5;
};

inline ClosingAngles closing_angles(double psi2, double psi3, double psi4, double tolerance = tol::closure) {
    const double r = closure_residual(psi2, psi3, psi4);
    if (!(std::abs(r) <= tolerance))
        throw Error(ErrorCode::NotClosed, "closure residual " + std::to_string(r));
    const Complex w5 = 1.0 - std::polar(1.0, psi4) + std::polar(1.0, psi3 + psi4) - std::polar(1.0, psi2 + psi3 + psi4);
    const Complex w1 =
        1.0 - std::polar(1.0, -psi2) + std::polar(1.0, -(psi2 + psi3)) - std::polar(1.0, -(psi2 + psi3 + psi4));
    return {principal_arg(w1), wrap_angle(-principal_arg(w5))};
}

/// Rates of psi1 and psi5 along a path with given rates of (psi2, psi3, psi4).
inline ClosingAngles closing_angle_rates(double psi2, double psi3, double psi4, double d2, double d3, double d4) {
    const Complex i{0.0, 1.0};
    const Complex e4 = std::polar(1.0, psi4), e34 = std::polar(1.0, psi3 + psi4),
                  e234 = std::polar(1.0, psi2 + psi3 + psi4);
    const Complex w5 = 1.0 - e4 + e34 - e234;
    const Complex dw5 = -i * e4 * d4 + i * e34 * (d3 + d4) - i * e234 * (d2 + d3 + d4);
    const Complex f2 = std::polar(1.0, -psi2), f23 = std::polar(1.0, -(psi2 + psi3)),
                  f234 = std::polar(1.0, -(psi2 + psi3 + psi4));
    const Complex w1 = 1.0 - f2 + f23 - f234;
    const Complex dw1 = i * f2 * d2 - i * f23 * (d2 + d3) + i * f234 * (d2 + d3 + d4);
    return {std::imag(dw1 / w1), -std::imag(dw5 / w5)};
}

inline PsiShape shape_from_psi234(double psi2, double psi3, double psi4, double tolerance = tol::closure) {
    const auto [p1, p5] = closing_angles(psi2, psi3, psi4, tolerance);
    return PsiShape{{p1, wrap_angle(psi2), wrap_angle(psi3), wrap_angle(psi4), p5}};
}

// ---------------------------------------------------------------------------
// psi4 from (psi2, psi3)

struct Psi4Solutions {
    enum class Kind { NoSolution, One, Two, Undetermined };
    Kind kind = Kind::NoSolution;
    std::array<double, 2> values{};

    int count() const { return kind == Kind::One ? 1 : kind == Kind::Two ? 2 : 0; }
};

inline Psi4Solutions solve_psi4(double psi2, double psi3) {
    const Complex zeta = -1.0 + std::polar(1.0, psi3) - std::polar(1.0, psi2 + psi3);
    const double m = std::abs(zeta);
    Psi4Solutions out;
    if (m < tol::singular_zeta) {
        out.kind = Psi4Solutions::Kind::Undetermined;
        return out;
    }
    const double arg = principal_arg(zeta);
    if (std::abs(m - 2.0) < tol::tangency) {
        out.kind = Psi4Solutions::Kind::One;
        out.values[0] = wrap_angle(pi - arg);
        return out;
    }
    if (m > 2.0) return out;
    const double a = std::acos(-m / 2.0);
    out.kind = Psi4Solutions::Kind::Two;
    out.values = {wrap_angle(-a - arg), wrap_angle(a - arg)};
    return out;
}

// ---------------------------------------------------------------------------
// alpha coordinates

/// alpha = A psi + b applied to (psi2, psi3, psi4), without normalization.
inline Vec3 alpha_from_psi234(double psi2, double psi3, double psi4) {
    return {-0.5 * psi2 - psi3 - 0.5 * psi4, -0.5 * psi2 - 0.5 * psi4 + pi, -0.5 * psi2 + 0.5 * psi4};
}

/// Inverse affine map, (psi2, psi3, psi4) wrapped to (-pi, pi].
inline Vec3 psi234_from_alpha(const Vec3& a) {
    const double a2 = a[1] - pi;
    return {wrap_angle(-a2 - a[2]), wrap_angle(-a[0] + a2), wrap_angle(-a2 + a[2])};
}

inline AlphaPoint psi_to_alpha(const PsiShape& s) {
    return AlphaPoint::normalized(TorusPoint::from(alpha_from_psi234(s.psi[1], s.psi[2], s.psi[3])));
}

inline PsiShape alpha_to_psi(const TorusPoint& p, double tolerance = tol::closure) {
    const double c = constraint_C(p);
    if (!(std::abs(c) <= tolerance))
        throw Error(ErrorCode::NotClosed, "constraint residual " + std::to_string(c));
    const Vec3 q = psi234_from_alpha(p.vec());
    // closure_residual(psi(alpha)) == C(alpha) identically; allow for wrapping roundoff.
    return shape_from_psi234(q[0], q[1], q[2], tolerance + 1e-14);
}

struct Alpha3Lift {
    enum class Status { Ok, Undefined, OffSurface };
    Status status = Status::OffSurface;
    double value = 0.0;

    bool ok() const { return status == Status::Ok; }
};

/// alpha3 in [0, pi] on the surface over (alpha1, alpha2).
inline Alpha3Lift alpha3_lift(double alpha1, double alpha2) {
    const double c1 = std::cos(alpha1), c2 = std::cos(alpha2);
    const double num = -3.0 - 4.0 * c1 * c2;
    const double den = 4.0 * (c1 + c2);
    Alpha3Lift out;
    if (std::abs(num) < 1e-9 && std::abs(den) < 1e-9) {
        out.status = Alpha3Lift::Status::Undefined;
        return out;
    }
    const double x = num / den;
    if (!(std::abs(x) <= 1.0 + tol::acos_clamp)) return out;
    out.status = Alpha3Lift::Status::Ok;
    out.value = safe_acos(x);
    return out;
}

// ---------------------------------------------------------------------------

/// k with sum(psi) = (1 + 2k) pi, k in {-2, -1, 0, 1}.
inline int angle_sum_class(const PsiShape& s, double tolerance = 1e-8) {
    const double x = (s.sum() / pi - 1.0) / 2.0;
    const double k = std::round(x);
    if (std::abs(x - k) * two_pi > tolerance || k < -2 || k > 1)
        throw Error(ErrorCode::Inconsistent, "angle sum " + std::to_string(s.sum()) + " is not an odd multiple of pi");
    return static_cast<int>(k);
}

/// Maximal angle-wise distance modulo 2 pi.
inline double shape_distance(const PsiShape& a, const PsiShape& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < 5; ++i) d = std::max(d, std::abs(wrap_angle(a.psi[i] - b.psi[i])));
    return d;
}

inline VertexConfig vertices_from_shape(const PsiShape& s, double theta) {
    return vertices_from_shape(s.psi[1], s.psi[2], s.psi[3], theta);
}

inline PsiShape regular_shape(double angle) { return PsiShape{{angle, angle, angle, angle, angle}}; }

}  // namespace pentagon
