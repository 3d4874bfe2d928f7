// Vertex reconstruction, relative angles, psi4 branches and the alpha chart.

#include <pentagon/geometry.hpp>

#include <gtest/gtest.h>

#include <optional>
#include <random>

using namespace pentagon;

namespace {

double moment(const VertexConfig& v) {
    double s = 0.0;
    for (const Complex& z : v.z) s += std::norm(z);
    return s;
}

/// Random closed shape from random (psi2, psi3) and one of the psi4 branches.
std::optional<PsiShape> random_shape(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-pi, pi);
    const double p2 = u(rng), p3 = u(rng);
    const Psi4Solutions s = solve_psi4(p2, p3);
    if (s.count() == 0) return std::nullopt;
    return shape_from_psi234(p2, p3, s.values[rng() % static_cast<unsigned>(s.count())]);
}

}  // namespace

TEST(Vertices, RegularShapesHaveDocumentedInertia) {
    const double c = 3.0 * pi / 5.0, s = pi / 5.0;
    EXPECT_NEAR(moment(vertices_from_shape(c, c, c, 0.0)), (5.0 + std::sqrt(5.0)) / 2.0, 1e-12);
    EXPECT_NEAR(moment(vertices_from_shape(s, s, s, 0.0)), (5.0 - std::sqrt(5.0)) / 2.0, 1e-12);
}

TEST(Vertices, CentroidEdgesAndOrientation) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 200; ++k) {
        const double theta = u(rng);
        const VertexConfig v = vertices_from_shape(u(rng), u(rng), u(rng), theta);
        Complex sum = 0.0;
        for (const Complex& z : v.z) sum += z;
        EXPECT_LT(std::abs(sum), 1e-14);
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(v.z[i + 1] - v.z[i]), 1.0, 1e-14);
        EXPECT_NEAR(wrap_angle(std::arg(v.z[1] - v.z[0]) - theta), 0.0, 1e-12);
    }
}

TEST(Vertices, FifthEdgeUnitExactlyOnClosedShapes) {
    std::mt19937_64 rng(11);
    int n = 0;
    while (n < 500) {
        const auto s = random_shape(rng);
        if (!s) continue;
        ++n;
        const VertexConfig v = vertices_from_shape(*s, 0.3);
        EXPECT_NEAR(std::abs(v.z[0] - v.z[4]), 1.0, 1e-10);
    }
    const VertexConfig open = vertices_from_shape(0.1, 0.2, 0.3, 0.0);
    EXPECT_GT(std::abs(std::abs(open.z[0] - open.z[4]) - 1.0), 1e-3);
}

TEST(RelativeAngles, RegularAndRoundTrip) {
    const double c = 3.0 * pi / 5.0;
    const PsiShape r = psi_from_vertices(vertices_from_shape(c, c, c, 1.0));
    for (double x : r.psi) EXPECT_NEAR(x, c, 1e-12);

    std::mt19937_64 rng(3);
    int n = 0;
    while (n < 300) {
        const auto s = random_shape(rng);
        if (!s) continue;
        ++n;
        const PsiShape back = psi_from_vertices(vertices_from_shape(*s, -0.7));
        EXPECT_LT(shape_distance(back, *s), 1e-9);
    }
}

TEST(RelativeAngles, MirrorNegatesAngles) {
    const PsiShape s = shape_from_psi234(0.9, 1.4, solve_psi4(0.9, 1.4).values[0]);
    VertexConfig v = vertices_from_shape(s, 0.2);
    for (Complex& z : v.z) z = std::conj(z);
    const PsiShape m = psi_from_vertices(v);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(wrap_angle(m.psi[i] + s.psi[i]), 0.0, 1e-12);
}

TEST(RelativeAngles, DegenerateEdgeThrows) {
    VertexConfig v = vertices_from_shape(0.5, 0.5, 0.5, 0.0);
    v.z[2] = v.z[1];
    try {
        psi_from_vertices(v);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateEdge);
    }
}

TEST(ClosingAngles, RegularShapes) {
    for (double a : {3.0 * pi / 5.0, pi / 5.0}) {
        const ClosingAngles c = closing_angles(a, a, a);
        EXPECT_NEAR(c.psi1, a, 1e-12);
        EXPECT_NEAR(c.psi5, a, 1e-12);
    }
}

TEST(ClosingAngles, OpenTripleRejected) {
    try {
        closing_angles(0.1, 0.2, 0.3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotClosed);
        EXPECT_TRUE(e.is_input_error());
    }
}

TEST(ClosingAngles, RatesMatchFiniteDifferences) {
    const PsiShape s = shape_from_psi234(0.9, 1.4, solve_psi4(0.9, 1.4).values[1]);
    // move along the closure surface: vary psi2, psi3 and follow the same psi4 branch
    auto at = [](double e) {
        const double p2 = 0.9 + e, p3 = 1.4 - 0.5 * e;
        return shape_from_psi234(p2, p3, solve_psi4(p2, p3).values[1]);
    };
    const double h = 1e-6;
    const PsiShape a = at(h), b = at(-h);
    const double d4 = wrap_angle(a.psi[3] - b.psi[3]) / (2 * h);
    const ClosingAngles r = closing_angle_rates(s.psi[1], s.psi[2], s.psi[3], 1.0, -0.5, d4);
    EXPECT_NEAR(r.psi1, wrap_angle(a.psi[0] - b.psi[0]) / (2 * h), 1e-6);
    EXPECT_NEAR(r.psi5, wrap_angle(a.psi[4] - b.psi[4]) / (2 * h), 1e-6);
}

TEST(SolvePsi4, DocumentedCases) {
    EXPECT_EQ(solve_psi4(pi / 3, pi / 3).kind, Psi4Solutions::Kind::Undetermined);
    EXPECT_EQ(solve_psi4(pi, pi).kind, Psi4Solutions::Kind::NoSolution);
    const Psi4Solutions two = solve_psi4(3 * pi / 5, 3 * pi / 5);
    ASSERT_EQ(two.kind, Psi4Solutions::Kind::Two);
    EXPECT_NEAR(two.values[0], 3 * pi / 5, 1e-12);
    EXPECT_NEAR(two.values[1], pi / 5, 1e-12);
    for (double p4 : two.values) EXPECT_LT(std::abs(closure_residual(3 * pi / 5, 3 * pi / 5, p4)), 1e-12);
}

TEST(SolvePsi4, TangencyGivesOneSolution) {
    // psi3 = pi gives zeta = -2 + e^{i psi2}, and |zeta| = 2 when cos psi2 = 1/4
    const double p3 = pi;
    const double p2 = std::acos(0.25);
    const Psi4Solutions one = solve_psi4(p2, p3);
    ASSERT_EQ(one.kind, Psi4Solutions::Kind::One);
    EXPECT_LT(std::abs(closure_residual(p2, p3, one.values[0])), 1e-9);
}

TEST(SolvePsi4, RandomClosedShapesAreAmongBranches) {
    std::mt19937_64 rng(5);
    int n = 0;
    while (n < 500) {
        const auto s = random_shape(rng);
        if (!s) continue;
        ++n;
        const Psi4Solutions sol = solve_psi4(s->psi[1], s->psi[2]);
        double best = 1e9;
        for (int i = 0; i < sol.count(); ++i) {
            best = std::min(best, std::abs(wrap_angle(sol.values[i] - s->psi[3])));
            EXPECT_LT(std::abs(closure_residual(s->psi[1], s->psi[2], sol.values[i])), 1e-10);
        }
        EXPECT_LT(best, 1e-12);
    }
}

TEST(Constraint, DocumentedValues) {
    EXPECT_NEAR(constraint_C({-2 * pi / 5, 4 * pi / 5, 0.0}), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(constraint_C({0.0, 0.0, 0.0}), 15.0);
    EXPECT_NEAR(constraint_C({0.0, 0.0, pi - std::acos(7.0 / 8.0)}), 0.0, 1e-14);
}

TEST(Constraint, EvenInEachCoordinate) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int k = 0; k < 100; ++k) {
        const TorusPoint p{u(rng), u(rng), u(rng)};
        for (int mask = 0; mask < 8; ++mask) {
            const TorusPoint q{mask & 1 ? -p.alpha1 : p.alpha1, mask & 2 ? -p.alpha2 : p.alpha2,
                               mask & 4 ? -p.alpha3 : p.alpha3};
            EXPECT_NEAR(constraint_C(q), constraint_C(p), 1e-13);
        }
    }
}

TEST(Constraint, AgreesWithClosureResidual) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int k = 0; k < 200; ++k) {
        const double p2 = u(rng), p3 = u(rng), p4 = u(rng);
        EXPECT_NEAR(constraint_C(TorusPoint::from(alpha_from_psi234(p2, p3, p4))), closure_residual(p2, p3, p4), 1e-12);
    }
}

TEST(AlphaChart, DocumentedRegularShapes) {
    const AlphaPoint star = psi_to_alpha(regular_shape(pi / 5));
    EXPECT_NEAR(star.alpha1(), -2 * pi / 5, 1e-12);
    EXPECT_NEAR(star.alpha2(), 4 * pi / 5, 1e-12);
    EXPECT_NEAR(star.alpha3(), 0.0, 1e-12);
    const AlphaPoint pent = psi_to_alpha(regular_shape(3 * pi / 5));
    EXPECT_NEAR(pent.alpha1(), 4 * pi / 5, 1e-12);
    EXPECT_NEAR(pent.alpha2(), 2 * pi / 5, 1e-12);
    EXPECT_NEAR(pent.alpha3(), 0.0, 1e-12);
    const AlphaPoint mirror = psi_to_alpha(regular_shape(-pi / 5));
    EXPECT_NEAR(mirror.alpha1(), 2 * pi / 5, 1e-12);
    EXPECT_NEAR(mirror.alpha2(), -4 * pi / 5, 1e-12);

    for (double x : alpha_to_psi({-2 * pi / 5, 4 * pi / 5, 0.0}).psi) EXPECT_NEAR(x, pi / 5, 1e-12);
    for (double x : alpha_to_psi({4 * pi / 5, 2 * pi / 5, 0.0}).psi) EXPECT_NEAR(x, 3 * pi / 5, 1e-12);
}

TEST(AlphaChart, RoundTripAndNormalization) {
    std::mt19937_64 rng(17);
    int n = 0;
    while (n < 1000) {
        const auto s = random_shape(rng);
        if (!s) continue;
        ++n;
        const AlphaPoint a = psi_to_alpha(*s);
        EXPECT_LT(std::abs(constraint_C(a)), 1e-10);
        EXPECT_GE(a.alpha3(), 0.0);
        EXPECT_LT(a.alpha3(), pi);
        EXPECT_GT(a.alpha1(), -pi);
        EXPECT_LE(a.alpha1(), pi);
        EXPECT_LT(shape_distance(alpha_to_psi(a), *s), 1e-10);
    }
}

TEST(AlphaChart, LatticeShiftsAreInvisible) {
    const PsiShape s = shape_from_psi234(0.9, 1.4, solve_psi4(0.9, 1.4).values[0]);
    const Vec3 a = alpha_from_psi234(s.psi[1], s.psi[2], s.psi[3]);
    for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j)
            for (int k = -2; k <= 2; ++k) {
                const Vec3 shift{(i + 2 * j + k) * pi, (i + k) * pi, (i - k) * pi};
                const Vec3 b = a + shift;
                EXPECT_NEAR(constraint_C(TorusPoint::from(b)), constraint_C(TorusPoint::from(a)), 1e-12);
                const AlphaPoint n = AlphaPoint::normalized(TorusPoint::from(b));
                EXPECT_LT(shape_distance(alpha_to_psi(n, 1e-9), s), 1e-10);
                EXPECT_LT(shape_space_distance(a, b), 1e-12);
            }
}

TEST(AlphaChart, OffSurfaceRejected) {
    try {
        alpha_to_psi({0.0, 0.0, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotClosed);
    }
    EXPECT_THROW(AlphaPoint::on_surface({0.3, 0.3, 0.3}, 1e-10), Error);
}

TEST(Alpha3Lift, DocumentedCases) {
    const Alpha3Lift star = alpha3_lift(-2 * pi / 5, 4 * pi / 5);
    ASSERT_TRUE(star.ok());
    EXPECT_NEAR(star.value, 0.0, 1e-6);
    EXPECT_EQ(alpha3_lift(pi / 6, 5 * pi / 6).status, Alpha3Lift::Status::Undefined);
    const Alpha3Lift pent = alpha3_lift(4 * pi / 5, 2 * pi / 5);
    ASSERT_TRUE(pent.ok());
    EXPECT_NEAR(pent.value, 0.0, 1e-6);
    EXPECT_EQ(alpha3_lift(pi / 2, 1.5).status, Alpha3Lift::Status::OffSurface);
}

TEST(Alpha3Lift, ConsistentWithConstraint) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-pi, pi);
    int lifted = 0;
    for (int k = 0; k < 2000; ++k) {
        const double a1 = u(rng), a2 = u(rng);
        const Alpha3Lift l = alpha3_lift(a1, a2);
        if (!l.ok()) continue;
        ++lifted;
        EXPECT_LT(std::abs(constraint_C({a1, a2, l.value})), 1e-10);
    }
    EXPECT_GT(lifted, 100);
}

TEST(AngleSum, Classes) {
    EXPECT_EQ(angle_sum_class(regular_shape(3 * pi / 5)), 1);
    EXPECT_EQ(angle_sum_class(regular_shape(pi / 5)), 0);
    EXPECT_EQ(angle_sum_class(regular_shape(-pi / 5)), -1);
    EXPECT_EQ(angle_sum_class(regular_shape(-3 * pi / 5)), -2);
    EXPECT_THROW(angle_sum_class(regular_shape(0.1)), Error);
}
