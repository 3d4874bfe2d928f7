// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <pentagon/pentagon.hpp>

#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace pentagon;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

PsiShape random_shape(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-pi, pi);
    for (;;) {
        const double p2 = u(rng), p3 = u(rng);
        const Psi4Solutions s = solve_psi4(p2, p3);
        if (s.count() == 0) continue;
        return shape_from_psi234(p2, p3, s.values[rng() % static_cast<unsigned>(s.count())]);
    }
}

/// The twenty relabellings and reflections of a shape, built directly on psi.
std::vector<PsiShape> psi_images(const PsiShape& s) {
    std::vector<PsiShape> out;
    for (int k = 0; k < 5; ++k)
        for (int rev = 0; rev < 2; ++rev)
            for (double sign : {1.0, -1.0}) {
                PsiShape t;
                for (int i = 0; i < 5; ++i) {
                    const int j = rev ? (k - i + 10) % 5 : (k + i) % 5;
                    t.psi[static_cast<std::size_t>(i)] = sign * s.psi[static_cast<std::size_t>(j)];
                }
                out.push_back(t);
            }
    return out;
}

double max_psi_difference(const PsiShape& a, const PsiShape& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < 5; ++i) m = std::max(m, std::abs(wrap_angle(a.psi[i] - b.psi[i])));
    return m;
}

/// Shape (psi1, x, psi3, x, psi1): psi3 from the closure relation by bisection.
PsiShape mirror_symmetric_shape(double x) {
    auto f = [x](double y) { return closure_residual(x, y, x); };
    const int n = 720;
    for (int k = 0; k < n; ++k) {
        double lo = -pi + two_pi * k / n, hi = lo + two_pi / n;
        if ((f(lo) < 0.0) == (f(hi) < 0.0)) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            ((f(mid) < 0.0) == (f(lo) < 0.0) ? lo : hi) = mid;
        }
        return shape_from_psi234(x, 0.5 * (lo + hi), x);
    }
    throw std::runtime_error("no symmetric closure");
}

PsiShape shape_at(const ParametrizedLoop& l, double t) {
    return alpha_to_psi(TorusPoint::from(l.state(t).alpha), 1e-8);
}

}  // namespace

int main() {
    const ParametrizedLoop star = pentagram_loop();
    const ParametrizedLoop pent = pentagon_loop();
    const ParametrizedLoop conv = convex_boundary_loop();
    const PhaseReport star_phase = geometric_phase(star);
    const PhaseReport pent_phase = geometric_phase(pent);
    const PhaseReport conv_phase = geometric_phase(conv);

    {
        const double d = star_phase.delta_theta;
        report(1, "pentagram loop phase", std::abs(d - 0.78837) <= 1e-3,
               fmt("delta_theta=%.6f rad (%.2f deg), expected 0.78837 +- 1e-3", d, d * 180.0 / pi));
    }
    {
        const double d = pent_phase.delta_theta;
        report(2, "pentagon loop phase", std::abs(d - 0.49147) <= 1e-3,
               fmt("delta_theta=%.6f rad, expected 0.49147 +- 1e-3", d));
    }
    {
        const double d = conv_phase.delta_theta;
        report(3, "convex boundary phase", std::abs(d - 0.33117) <= 1e-3,
               fmt("delta_theta=%.6f rad, expected 0.33117 +- 1e-3", d));
    }
    {
        const double w = star.omega();
        report(4, "pentagram base frequency", std::abs(w - 7.3634) <= 2e-3,
               fmt("omega=%.6f, expected 7.3634 +- 2e-3 (tau=%.9f)", w, star.tau()));
    }
    {
        const FourierSeries f = fourier_cosine_psi5(star);
        const double expected[4] = {-0.9646, -0.3974, 0.1595, -0.0779};
        double worst = 0.0;
        for (int n = 1; n <= 4; ++n) worst = std::max(worst, std::abs(f.cos_coeffs[static_cast<std::size_t>(n)] - expected[n - 1]));
        const double e0 = std::abs(f.cos_coeffs[0] - pi / 5);
        const double z = std::max(std::abs(f.cos_coeffs[5]), std::abs(f.cos_coeffs[10]));
        report(5, "psi5 cosine coefficients", e0 <= 1e-5 && worst <= 2e-3 && z <= 1e-4,
               fmt("|a0-pi/5|=%.2e, max|a1..a4 - table|=%.2e, max(|a5|,|a10|)=%.2e", e0, worst, z));
    }
    {
        const FourierSeries f = fourier_theta_dot(star);
        const double a0 = f.cos_coeffs[0], a5 = f.cos_coeffs[5], b5 = f.sin_coeffs[4];
        const double consistency = std::abs(a0 * star.tau() - star_phase.delta_theta);
        report(6, "thetadot Fourier coefficients",
               std::abs(a0 - 0.9239) <= 1e-3 && std::abs(a5 + 0.3977) <= 2e-3 && std::abs(b5) <= 1e-4 &&
                   consistency <= 1e-6,
               fmt("a0=%.5f a5=%.5f b5=%.2e |a0 tau - delta_theta|=%.2e", a0, a5, b5, consistency));
    }
    {
        const double i_min = inertia({-2 * pi / 5, 4 * pi / 5, 0.0});
        const double i_sad = inertia({0.0, 0.0, pi - std::acos(7.0 / 8.0)});
        const double i_max = inertia({4 * pi / 5, 2 * pi / 5, 0.0});
        const double lo = (5.0 - std::sqrt(5.0)) / 2.0, hi = (5.0 + std::sqrt(5.0)) / 2.0;
        double err = std::max({std::abs(i_min - lo), std::abs(i_sad - 2.5), std::abs(i_max - hi)});
        const CriticalStructure cs = inertia_critical_points();
        for (const CriticalPoint& c : cs.points) {
            const double ref = c.type == CriticalType::Min ? lo : c.type == CriticalType::Max ? hi : 2.5;
            err = std::max(err, std::abs(c.value - ref));
        }
        const bool counts = cs.minima == 2 && cs.saddles == 10 && cs.maxima == 2;
        report(7, "inertia critical structure", err <= 1e-12 && counts && cs.euler_characteristic() == -6,
               fmt("max value error=%.2e, counts (%g, %g, %g)", err, cs.minima, cs.saddles, cs.maxima) +
                   ", euler=" + std::to_string(cs.euler_characteristic()));
    }
    {
        double worst = 0.0;
        for (const ParametrizedLoop* l : {&star, &pent, &conv})
            worst = std::max(worst, max_angular_momentum(*l, reconstruct_motion(*l, 0.0)));
        report(8, "zero angular momentum along reconstructed motion", worst < 1e-6,
               fmt("max |L|=%.2e over all samples of the three loops, bound 1e-6", worst));
    }
    {
        std::mt19937_64 rng(2024);
        double field_err = 0.0, image_err = 0.0, trip_err = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const PsiShape s = random_shape(rng);
            const AlphaPoint a = psi_to_alpha(s);
            const double I0 = inertia(a), B0 = magnetic_B(a), C0 = constraint_C(a);
            std::vector<Vec3> reference;
            for (const PsiShape& img : psi_images(s)) reference.push_back(psi_to_alpha(img).vec());
            for (const GroupElement& g : group_elements(SymmetryGroup::D10)) {
                const AlphaPoint ga = act_alpha(g, a);
                field_err = std::max({field_err, std::abs(inertia(ga) - I0), std::abs(magnetic_B(ga) - B0),
                                      std::abs(constraint_C(ga) - C0)});
                double nearest = 1e300;
                for (const Vec3& r : reference) nearest = std::min(nearest, shape_space_distance(ga.vec(), r));
                image_err = std::max(image_err, nearest);
            }
            trip_err = std::max(trip_err, max_psi_difference(alpha_to_psi(a), s));
            trip_err = std::max(trip_err, shape_space_distance(psi_to_alpha(alpha_to_psi(a)).vec(), a.vec()));
        }

        // stated along the contour flow direction, the reverse of the positive-phase traversal
        const ParametrizedLoop flow_dir = star.reversed();
        const double tau = star.tau();
        double shift_err = 0.0;
        for (int k = 0; k < 200; ++k) {
            const double t = tau * k / 200.0;
            const PsiShape now = shape_at(flow_dir, t), later = shape_at(flow_dir, t + tau / 5.0);
            for (int i = 1; i <= 5; ++i) shift_err = std::max(shift_err, std::abs(wrap_angle(now.at(i) - later.at(i + 1))));
        }

        const double c = 0.3 * tau / two_pi;
        const ParametrizedLoop warped = star.reparametrized(
            [=](double s) { return s + c * std::sin(two_pi * s / tau); },
            [=](double s) { return 1.0 + 0.3 * std::cos(two_pi * s / tau); }, star.samples().size() - 1);
        const double reparam_err = std::abs(geometric_phase(warped).delta_theta - star_phase.delta_theta);

        const PsiShape mirror_sym = mirror_symmetric_shape(1.2);
        const bool symmetric = std::abs(wrap_angle(mirror_sym.psi[4] - mirror_sym.psi[0])) < 1e-10;
        std::mt19937_64 rng2(7);
        const bool orbits = symmetric && orbit(regular_shape(pi / 5), SymmetryGroup::D5plus).size() == 1 &&
                            orbit(regular_shape(pi / 5), SymmetryGroup::D10).size() == 2 &&
                            orbit(regular_shape(3 * pi / 5), SymmetryGroup::D10).size() == 2 &&
                            orbit(mirror_sym, SymmetryGroup::D5plus).size() == 5 &&
                            orbit(mirror_sym, SymmetryGroup::D10).size() == 10 &&
                            orbit(random_shape(rng2), SymmetryGroup::D10).size() == 20;

        report(9, "property suites",
               field_err <= 1e-10 && image_err <= 1e-10 && trip_err <= 1e-10 && shift_err <= 1e-6 &&
                   reparam_err <= 1e-9 && orbits,
               fmt("D10 fields %.1e, images %.1e, round trip %.1e, phase shift %.1e", field_err, image_err, trip_err,
                   shift_err) +
                   fmt(", reparametrization %.1e, orbit lengths ", reparam_err) + (orbits ? "ok" : "wrong"));
    }
    {
        // chart centres need C3 away from zero; the regular shapes sit where it vanishes
        double t0 = 0.0, best = 0.0;
        for (const LoopSample& s : star.samples()) {
            const double c3 = std::abs(grad_C(TorusPoint::from(s.alpha))[2]);
            if (c3 > best) best = c3, t0 = s.t;
        }
        std::vector<AlphaPoint> centres{AlphaPoint::normalized(TorusPoint::from(star.state(t0).alpha))};
        for (double p4 : solve_psi4(0.9, 1.4).values) centres.push_back(psi_to_alpha(shape_from_psi234(0.9, 1.4, p4)));
        double stokes_err = 0.0;
        for (const AlphaPoint& centre : centres)
            for (double r : {0.01, 0.05, 0.1})
                stokes_err = std::max(stokes_err,
                                      std::abs(stokes_phase_small_loop(centre, r) - line_phase_small_loop(centre, r)));

        // chart arc against the same stretch of the global loop
        const ParametrizedLoop arc =
            trace_local_chart(AlphaPoint::normalized(TorusPoint::from(star.state(t0).alpha)), star.tau(), 2048,
                              ChartExitPolicy::Truncate);
        const int o = star.orientation();
        const ParametrizedLoop global_arc = ParametrizedLoop::from_evaluator(
            LoopLabel::Unlabelled, arc.tau(), 1,
            [&star, t0, o](double s) {
                LoopState st = star.state(t0 + o * s);
                st.alpha_dot = static_cast<double>(o) * st.alpha_dot;
                return st;
            },
            2048, {}, false, true);
        const double h = hausdorff_distance(arc, global_arc);
        report(10, "cross-method agreement", stokes_err <= 1e-6 && h < 1e-6,
               fmt("max |stokes - line|=%.2e, chart vs global Hausdorff=%.2e on an arc of length %.3f", stokes_err, h,
                   arc.tau()));
    }

    std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
