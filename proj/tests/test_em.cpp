#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pathtrans/em.hpp"
#include "pathtrans/error.hpp"

using namespace pathtrans;

namespace {

const ChartedSpace kM = ChartedSpace::minkowski4();
constexpr double kPi = std::numbers::pi;

Potential potential(const std::vector<std::string>& a) {
    std::vector<std::vector<Expression>> blocks;
    for (const auto& s : a) blocks.push_back({parse(s)});
    return Potential(CoefficientField(kM, 1, blocks));
}

PathCurve circle(double cx, double cy, double r) {
    auto n = [](double v) { return Expression::number(v); };
    const Expression s = Expression::variable("s");
    return PathCurve::expression(kM, {n(0), n(cx) + n(r) * cos(n(2 * kPi) * s), n(cy) + n(r) * sin(n(2 * kPi) * s), n(0)},
                                 0, 1);
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::Config;
}

}  // namespace

TEST(FieldTensor, EqualsCurvatureOfThePotential) {
    oracle::Rng rng(5);
    for (const auto& f : {catalog("uniform_B", {{"B", 1.7}}), catalog("slice_demo"),
                          catalog("plane_wave", {{"eps", std::vector<double>{1, 0.2, 0, -1}}, {"k", std::vector<double>{1, 1, 0, 2}}})}) {
        const Potential a(f);
        for (int n = 0; n < 20; ++n) {
            const Point p{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            const auto ft = field_tensor(a, p);
            const auto r = curvature_at(f, p);
            for (std::size_t mu = 0; mu < 4; ++mu)
                for (std::size_t nu = 0; nu < 4; ++nu) EXPECT_EQ(ft.at(mu, nu), r.at(mu, nu)(0, 0));
        }
    }
}

TEST(FieldTensor, PlaneWaveAtQuarterPhase) {
    // A = (1, 0, 0, 0) cos(x1 + x3): F_01 = -dA_0/dx1 = sin(phase), F_31 = 0, F_03 = sin(phase)
    const Potential a(catalog("plane_wave", {{"eps", std::vector<double>{1, 0, 0, 0}}, {"k", std::vector<double>{0, 1, 0, 1}}}));
    const auto ft = field_tensor(a, {0, kPi / 2, 0, 0});
    EXPECT_NEAR(ft.at(0, 1).real(), 1.0, 1e-15);
    EXPECT_NEAR(ft.at(0, 3).real(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(ft.at(3, 1)), 0.0, 1e-15);
    EXPECT_NEAR(ft.at(1, 0).real(), -1.0, 1e-15);
}

TEST(GaugeTransform, GradientOfLambdaIsAdded) {
    const Potential a(catalog("zero"));
    const Potential b = gauge_transform(a, ScalarFieldFn(kM, "x1*x2"));
    const Point p{0.4, 2, -3, 1};
    const auto g = b.field().evaluate(p);
    EXPECT_EQ(g[0](0, 0), cd(0.0, 0.0));
    EXPECT_EQ(g[1](0, 0), cd(-3.0, 0.0));
    EXPECT_EQ(g[2](0, 0), cd(2.0, 0.0));
    EXPECT_EQ(g[3](0, 0), cd(0.0, 0.0));
}

TEST(GaugeTransform, BaseChangeMixesComponents) {
    const Potential a = potential({"0", "1", "0", "0"});
    std::vector<Expression> b(16);
    for (std::size_t i = 0; i < 4; ++i) b[i * 4 + i] = Expression::number(1.0);
    b[1 * 4 + 1] = Expression::number(2.0);
    b[2 * 4 + 1] = Expression::number(-1.0);
    const Potential t = gauge_transform(a, ScalarFieldFn(kM, "x0"), b);
    const auto g = t.field().evaluate({0, 0, 0, 0});
    EXPECT_EQ(g[0](0, 0), cd(1.0, 0.0));
    EXPECT_EQ(g[1](0, 0), cd(2.0, 0.0));
    EXPECT_EQ(g[2](0, 0), cd(-1.0, 0.0));
    std::vector<Expression> singular(16);
    EXPECT_EQ(kind_of([&] { gauge_transform(a, ScalarFieldFn(kM, "x0"), singular); }), ErrorKind::Singularity);
}

TEST(GaugeTransform, FieldTensorIsInvariant) {
    const Potential a(catalog("uniform_B", {{"B", 0.9}}));
    const Potential b = gauge_transform(a, ScalarFieldFn(kM, "sin(x0*x1) + x2^3 - exp(x3)"));
    oracle::Rng rng(17);
    for (int n = 0; n < 20; ++n) {
        const Point p{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto fa = field_tensor(a, p);
        const auto fb = field_tensor(b, p);
        for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(std::abs(fa.components[i] - fb.components[i]), 0.0, 1e-12);
    }
}

struct ResidualRow {
    GaugeCondition condition;
    double expected[3];
};

TEST(GaugeConditions, ResidualsOnHandBuiltPotentials) {
    const Point p{0.5, -1, 2, 0.3};
    const std::vector<Potential> pots{potential({"x0", "x1", "0", "0"}), potential({"0", "x2", "x1", "0"}),
                                      potential({"x3^2", "x1^2", "0", "x0*x3"})};
    // Lorenz: A0,0 - A1,1 - A2,2 - A3,3; Coulomb drops the time term
    const std::vector<ResidualRow> rows{{GaugeCondition::Lorenz, {0, 0, 1.5}},
                                        {GaugeCondition::Coulomb, {-1, 0, 1.5}},
                                        {GaugeCondition::Hamilton, {0.5, 0, 0.09}},
                                        {GaugeCondition::Axial, {0, 0, 0.15}}};
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_NEAR(std::abs(gauge_residual(pots[i], row.condition, p) - row.expected[i]), 0.0, 1e-10)
                << to_string(row.condition) << " potential " << i;
        }
    }
}

TEST(GaugeConditions, LambdaAndPhiResiduals) {
    const Point p{0.5, -1, 2, 0.3};
    const ScalarFieldFn lambda(kM, "x0^2 + x1^2");
    const ScalarFieldFn phi(kM, "x3^2");
    EXPECT_NEAR(std::abs(lambda_condition_residual(lambda, GaugeCondition::Lorenz, p)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(lambda_condition_residual(lambda, GaugeCondition::Coulomb, p) + 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(lambda_condition_residual(lambda, GaugeCondition::Hamilton, p) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(lambda_condition_residual(lambda, GaugeCondition::Axial, p)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(phi_condition_residual(phi, lambda, GaugeCondition::Lorenz, p) + 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(phi_condition_residual(phi, lambda, GaugeCondition::Coulomb, p) + 4.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(phi_condition_residual(phi, lambda, GaugeCondition::Hamilton, p)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(phi_condition_residual(phi, lambda, GaugeCondition::Axial, p) - 0.6), 0.0, 1e-12);
}

TEST(GaugeConditions, GaugeTransformKeepsConditionWhenLambdaResidualVanishes) {
    // x0^2 + x1^2 is a solution of the wave equation, so Lorenz is kept
    const Potential a = potential({"x0", "x1", "0", "0"});
    const Potential b = gauge_transform(a, ScalarFieldFn(kM, "x0^2 + x1^2"));
    EXPECT_NEAR(std::abs(gauge_residual(b, GaugeCondition::Lorenz, {0.2, 0.7, -1, 3})), 0.0, 1e-12);
}

TEST(GaugeConditions, NamesRoundTrip) {
    for (auto c : {GaugeCondition::Lorenz, GaugeCondition::Coulomb, GaugeCondition::Hamilton, GaugeCondition::Axial})
        EXPECT_EQ(parse_gauge_condition(to_string(c)), c);
    EXPECT_EQ(kind_of([] { parse_gauge_condition("landau"); }), ErrorKind::Config);
}

TEST(InertialFrame, PureGaugeVanishesInNewFrame) {
    const Potential a(catalog("pure_gauge", {{"f0", std::string("x1*x2 - x0")}}));
    const auto region = RegionSpec::box(std::vector<Interval>(4, Interval{-1, 1}), std::vector<std::size_t>(4, 5));
    const auto r = solve_inertial_frame(a, region, {0, 0, 0, 0}, kDefaultFlatnessTol, {}, cd(2.0, 0.0));
    for (std::size_t i = 0; i < r.normal.points.size(); ++i) {
        const Point& x = r.normal.points[i];
        EXPECT_NEAR(std::abs(r.lambda[i] + (x[1] * x[2] - x[0])), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(r.gauge[i] - 2.0 * std::exp(r.lambda[i])), 0.0, 1e-15);
    }
    EXPECT_LE(r.normal.transformed_max, 1e-12);
}

TEST(InertialFrame, NonzeroFieldStrengthIsRejected) {
    const Potential a(catalog("uniform_B", {{"B", 1.0}}));
    const auto region = RegionSpec::box(std::vector<Interval>(4, Interval{-1, 1}), std::vector<std::size_t>(4, 3));
    try {
        solve_inertial_frame(a, region, {0, 0, 0, 0});
        FAIL() << "expected a gate error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Gate);
        EXPECT_NE(std::string(e.what()).find("F_12"), std::string::npos);
    }
    EXPECT_EQ(kind_of([&] { solve_inertial_frame(Potential(catalog("zero")), region, {0, 0, 0, 0}, 1e-10, {}, 0.0); }),
              ErrorKind::Config);
}

TEST(AharonovBohm, UnitaryPhaseAndFluxQuantum) {
    const Potential a(catalog("ab_flux", {{"phi", 1.0}}));
    const auto h = ab_phase(a, circle(0.1, 0, 1), Coupling::u1(1.0));
    EXPECT_NEAR(std::abs(h.value), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(h.value - std::exp(cd(0, -1.0))), 0.0, 1e-7);
    const Potential q(catalog("ab_flux", {{"phi", 2 * kPi}}));
    EXPECT_NEAR(std::abs(ab_phase(q, circle(0, 0, 2), Coupling::u1(1.0)).value - 1.0), 0.0, 1e-7);
    // the real coupling gives the damping factor instead
    EXPECT_NEAR(std::abs(ab_phase(a, circle(0, 0, 1), Coupling::real()).value - std::exp(-1.0)), 0.0, 1e-7);
}

TEST(Stokes, UniformBLoopEqualsFlux) {
    const Potential a(catalog("uniform_B", {{"B", 1.4}}));
    const auto r = stokes_check(a, circle(0.3, -0.2, 0.7));
    EXPECT_NEAR(r.loop_integral.real(), 1.4 * kPi * 0.49, 1e-7);
    EXPECT_LE(r.defect, 1e-6);
    EXPECT_EQ(r.axis_a, 1u);
    EXPECT_EQ(r.axis_b, 2u);
}

TEST(Stokes, NonSquarePolygonLoop) {
    const Potential a(catalog("plane_wave", {{"eps", std::vector<double>{0, 1, 0.5, 0}}, {"k", std::vector<double>{0, 0.7, 1.1, 0}}}));
    const PathCurve tri = PathCurve::polyline(kM, {{0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0.2, 0.8, 0}, {0, 0, 0, 0}}, 0, 1);
    EXPECT_LE(stokes_check(a, tri).defect, 1e-6);
}

TEST(Stokes, SingularAxisInsideLoopIsRejected) {
    const Potential a(catalog("ab_flux", {{"phi", 1.0}}));
    try {
        stokes_check(a, circle(0.1, 0.1, 1));
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Singularity);
        EXPECT_NE(std::string(e.what()).find("Stokes theorem does not apply"), std::string::npos);
    }
    EXPECT_LE(stokes_check(a, circle(3, 0, 1)).defect, 1e-6);
}
