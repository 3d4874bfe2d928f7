#pragma once

// Discrete symmetries of the labelled pentagon: vertex rotation R, vertex
// reflection V (fixing z3) and the mirror M = -id, together generating D10.
// D5+ = <R, MV> preserves orientation and is used for the fundamental region.

#include <pentagon/geometry.hpp>

#include <algorithm>
#include <array>
#include <compare>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

namespace pentagon {

/// Element M^m V^v R^r of D10 in normal form.
struct GroupElement {
    int r = 0;  // 0..4
    bool v = false;
    bool m = false;

    static GroupElement identity() { return {}; }
    static GroupElement rotation(int k = 1) { return {((k % 5) + 5) % 5, false, false}; }
    static GroupElement reflection() { return {0, true, false}; }
    static GroupElement mirror() { return {0, false, true}; }

    bool in_d5_plus() const { return v == m; }

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
    /// Lexicographic in (m, v, r).
    friend bool operator<(const GroupElement& a, const GroupElement& b) {
        return std::tuple(a.m, a.v, a.r) < std::tuple(b.m, b.v, b.r);
    }
};

/// Composition g o h, acting as act(g o h, s) = act(g, act(h, s)).
inline GroupElement compose(const GroupElement& g, const GroupElement& h) {
    // R^r V = V R^-r, and M is central.
    const int r = (h.v ? -g.r : g.r) + h.r;
    return {((r % 5) + 5) % 5, g.v != h.v, g.m != h.m};
}

inline GroupElement inverse(const GroupElement& g) {
    const int r = g.v ? g.r : -g.r;
    return {((r % 5) + 5) % 5, g.v, g.m};
}

inline GroupElement power(GroupElement g, int n) {
    GroupElement out;
    for (int i = 0; i < n; ++i) out = compose(out, g);
    return out;
}

enum class SymmetryGroup { D5plus, D10 };

/// All elements of the group in lexicographic order.
inline std::vector<GroupElement> group_elements(SymmetryGroup group) {
    std::vector<GroupElement> out;
    for (int m = 0; m < 2; ++m)
        for (int v = 0; v < 2; ++v) {
            if (group == SymmetryGroup::D5plus && m != v) continue;
            for (int r = 0; r < 5; ++r) out.push_back({r, v != 0, m != 0});
        }
    return out;
}

/// Signed permutation action on the relative angles: M^m V^v R^r psi.
inline PsiShape act_psi(const GroupElement& g, const PsiShape& s) {
    PsiShape rotated;
    for (int i = 1; i <= 5; ++i) rotated.psi[static_cast<std::size_t>(i - 1)] = s.at(i + g.r);
    PsiShape out = rotated;
    if (g.v)
        for (int i = 1; i <= 5; ++i) out.psi[static_cast<std::size_t>(i - 1)] = -rotated.at(6 - i);
    if (g.m)
        for (double& x : out.psi) x = -x;
    for (double& x : out.psi) x = wrap_angle(x);
    return out;
}

/// Image of an alpha triple under R^r, computed through the relative angles (no normalization).
inline Vec3 rotate_alpha_raw(int r, const Vec3& a) {
    if (r % 5 == 0) return a;
    const PsiShape s = alpha_to_psi(TorusPoint::from(a), 1e-8);
    const PsiShape t = act_psi(GroupElement::rotation(r), s);
    return alpha_from_psi234(t.psi[1], t.psi[2], t.psi[3]);
}

inline AlphaPoint act_alpha(const GroupElement& g, const AlphaPoint& p) {
    Vec3 a = p.vec();
    if (std::abs(constraint_C(p)) > 1e-8)
        throw Error(ErrorCode::NotClosed, "act_alpha requires a point on the shape surface");
    a = rotate_alpha_raw(g.r, a);
    if (g.v) a = {-a[0], -a[1], a[2]};
    if (g.m) a = {-a[0], -a[1], -a[2]};
    return AlphaPoint::normalized(TorusPoint::from(a));
}

/// Distinct images of s under the chosen group.
inline std::vector<PsiShape> orbit(const PsiShape& s, SymmetryGroup group) {
    std::vector<PsiShape> out;
    for (const GroupElement& g : group_elements(group)) {
        const PsiShape img = act_psi(g, s);
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const PsiShape& o) { return shape_distance(o, img) < tol::shape_equal; });
        if (!seen) out.push_back(img);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Symmetry curves

inline constexpr double b1_t_min = -2.0 * pi / 5.0;
inline constexpr double b1_t_max = 4.0 * pi / 5.0;

/// Quarter b1 of the basic symmetry curve alpha3 = 0.
inline AlphaPoint symmetry_curve_b1(double t) {
    if (!(t >= b1_t_min - 1e-15 && t <= b1_t_max + 1e-15))
        throw Error(ErrorCode::DomainError, "b1 parameter outside [-2pi/5, 4pi/5]");
    const double c = std::cos(t / 2.0);
    const double a2 = safe_acos(-(3.0 + 4.0 * std::cos(t)) / (8.0 * c * c));
    return AlphaPoint::normalized({t, a2, 0.0});
}

/// Quarter q in 1..4 of the curve alpha3 = 0; b2 and b4 are the quarter turns of b1, b3 = -b1.
inline Vec3 symmetry_curve_quarter(int q, double t) {
    const Vec3 b = symmetry_curve_b1(t).vec();
    switch (q) {
        case 1: return {b[0], b[1], 0.0};
        case 2: return {b[1], -b[0], 0.0};
        case 3: return {-b[0], -b[1], 0.0};
        case 4: return {-b[1], b[0], 0.0};
    }
    throw Error(ErrorCode::DomainError, "symmetry curve quarter must be 1..4");
}

/// The involution R^k MV R^-k whose fixed set is the symmetry curve with vertex z_{3-k} on the mirror axis.
inline GroupElement symmetry_involution(int k) {
    const GroupElement mv{0, true, true};
    return compose(compose(GroupElement::rotation(k), mv), GroupElement::rotation(-k));
}

/// Involution fixing the shapes with vertex z_j on their mirror axis.
inline GroupElement vertex_mirror_involution(int j) { return symmetry_involution(((3 - j) % 5 + 5) % 5); }

/// Defects vanishing on the symmetry curve of vertex j: (psi_{j+1} - psi_{j-1}, psi_{j+2} - psi_{j-2}).
inline std::pair<double, double> mirror_defect(const PsiShape& s, int j) {
    return {wrap_angle(s.at(j + 1) - s.at(j - 1)), wrap_angle(s.at(j + 2) - s.at(j - 2))};
}

// ---------------------------------------------------------------------------
// Fundamental region phi

namespace detail {

/// Representative with alpha3 in (0, pi], used for points of phi whose corners sit at alpha3 = pi.
inline Vec3 normalize_alpha_upper(const Vec3& a) {
    Vec3 n = normalize_alpha(a);
    if (n[2] < 1e-12) n = {wrap_angle(n[0] - pi), wrap_angle(n[1] - pi), pi};
    return n;
}

struct Point2 {
    double x, y;
};

}  // namespace detail

/// The quadrilateral patch bounded by R(b4), R^3(b1), R^4(b2), R^2(b3), containing alpha1 = alpha2 = 0.
/// In alpha coordinates it is a graph over (alpha1, alpha2) with alpha3 in (0, pi).
class FundamentalRegion {
public:
    struct Arc {
        int rotation;  // power of R
        int quarter;   // which b_q
    };

    static const FundamentalRegion& instance() {
        static const FundamentalRegion region;
        return region;
    }

    static constexpr std::array<Arc, 4> arcs{{{1, 4}, {3, 1}, {4, 2}, {2, 3}}};

    /// Point of boundary arc i at parameter t in [-2pi/5, 4pi/5], alpha3 in (0, pi].
    static Vec3 arc_point(int i, double t) {
        const Arc& arc = arcs[static_cast<std::size_t>(i)];
        const Vec3 b = symmetry_curve_quarter(arc.quarter, std::clamp(t, b1_t_min, b1_t_max));
        return detail::normalize_alpha_upper(rotate_alpha_raw(arc.rotation, b));
    }

    /// Signed distance in the (alpha1, alpha2) plane: positive inside, negative outside.
    double depth(const AlphaPoint& p) const {
        double d = depth2(p.alpha1(), p.alpha2());
        if (p.alpha3() < 1e-6) {
            // Corners of phi sit at alpha3 = pi, which normalizes to alpha3 = 0 with shifted alpha1, alpha2.
            d = std::max(d, depth2(wrap_angle(p.alpha1() - pi), wrap_angle(p.alpha2() - pi)));
        }
        return d;
    }

    bool contains(const AlphaPoint& p, double tolerance = tol::boundary) const { return depth(p) >= -tolerance; }

    const std::vector<detail::Point2>& polygon() const { return polygon_; }

private:
    static constexpr int samples_per_arc = 400;

    FundamentalRegion() {
        for (int i = 0; i < 4; ++i) {
            std::vector<detail::Point2> pts;
            for (int k = 0; k <= samples_per_arc; ++k) {
                const double t = b1_t_min + (b1_t_max - b1_t_min) * k / samples_per_arc;
                const Vec3 a = arc_point(i, t);
                pts.push_back({a[0], a[1]});
            }
            arc_samples_[static_cast<std::size_t>(i)] = pts;
            polygon_.insert(polygon_.end(), pts.begin(), pts.end() - 1);
        }
        double area = 0.0;
        for (std::size_t k = 0; k < polygon_.size(); ++k) {
            const auto& p = polygon_[k];
            const auto& q = polygon_[(k + 1) % polygon_.size()];
            area += p.x * q.y - q.x * p.y;
        }
        orientation_ = area > 0.0 ? 1.0 : -1.0;
    }

    bool polygon_contains(double x, double y) const {
        bool in = false;
        for (std::size_t k = 0, j = polygon_.size() - 1; k < polygon_.size(); j = k++) {
            const auto& a = polygon_[k];
            const auto& b = polygon_[j];
            if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
        }
        return in;
    }

    struct Foot {
        double distance;
        double side;  // > 0 when the point lies inside relative to this arc
        bool interior;
    };

    Foot nearest_on_arc(int i, double x, double y) const {
        const auto& pts = arc_samples_[static_cast<std::size_t>(i)];
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double d = std::hypot(pts[k].x - x, pts[k].y - y);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        const double dt = (b1_t_max - b1_t_min) / samples_per_arc;
        double lo = b1_t_min + dt * (static_cast<double>(best) - 1.0);
        double hi = lo + 2.0 * dt;
        lo = std::max(lo, b1_t_min);
        hi = std::min(hi, b1_t_max);
        auto dist2 = [&](double t) {
            const Vec3 a = arc_point(i, t);
            return (a[0] - x) * (a[0] - x) + (a[1] - y) * (a[1] - y);
        };
        // golden-section search for the foot point
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
        double fc = dist2(c), fd = dist2(d);
        for (int it = 0; it < 80 && hi - lo > 1e-14; ++it) {
            if (fc < fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = dist2(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = dist2(d);
            }
        }
        const double t = 0.5 * (lo + hi);
        const Vec3 foot = arc_point(i, t);
        const double h = 1e-6;
        const Vec3 ta = arc_point(i, std::min(t + h, b1_t_max));
        const Vec3 tb = arc_point(i, std::max(t - h, b1_t_min));
        const double tx = ta[0] - tb[0], ty = ta[1] - tb[1];
        const double side = orientation_ * (tx * (y - foot[1]) - ty * (x - foot[0]));
        const bool interior = t > b1_t_min + 1e-9 && t < b1_t_max - 1e-9;
        return {std::hypot(foot[0] - x, foot[1] - y), side, interior};
    }

    double depth2(double x, double y) const {
        Foot nearest{std::numeric_limits<double>::infinity(), 0.0, false};
        for (int i = 0; i < 4; ++i) {
            const Foot f = nearest_on_arc(i, x, y);
            if (f.distance < nearest.distance) nearest = f;
        }
        bool inside = polygon_contains(x, y);
        if (nearest.distance < 1e-3 && nearest.interior) inside = nearest.side > 0.0;
        return inside ? nearest.distance : -nearest.distance;
    }

    std::array<std::vector<detail::Point2>, 4> arc_samples_;
    std::vector<detail::Point2> polygon_;
    double orientation_ = 1.0;
};

struct Canonical {
    AlphaPoint point;
    GroupElement element;
};

/// The D5+ image of p inside phi and the element used. Points on the boundary of phi get
/// the representative with the lexicographically smallest element.
inline Canonical canonicalize(const AlphaPoint& p) {
    const FundamentalRegion& region = FundamentalRegion::instance();
    std::vector<std::pair<GroupElement, AlphaPoint>> images;
    std::vector<double> depths;
    for (const GroupElement& g : group_elements(SymmetryGroup::D5plus)) {
        const AlphaPoint img = act_alpha(g, p);
        images.emplace_back(g, img);
        depths.push_back(region.depth(img));
    }
    const double best = *std::max_element(depths.begin(), depths.end());
    for (std::size_t k = 0; k < images.size(); ++k)
        if (depths[k] >= best - tol::boundary) return {images[k].second, images[k].first};
    return {images.front().second, images.front().first};
}

}  // namespace pentagon
