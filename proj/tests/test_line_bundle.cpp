#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pathtrans/error.hpp"
#include "pathtrans/line_bundle.hpp"

using namespace pathtrans;

namespace {

const ChartedSpace kM = ChartedSpace::minkowski4();
constexpr double kPi = std::numbers::pi;

PathCurve circle(double cx, double cy, double r) {
    auto n = [](double v) { return Expression::number(v); };
    const Expression s = Expression::variable("s");
    return PathCurve::expression(kM, {n(0), n(cx) + n(r) * cos(n(2 * kPi) * s), n(cy) + n(r) * sin(n(2 * kPi) * s), n(0)},
                                 0, 1);
}

RegionSpec cube(std::size_t n) {
    return RegionSpec::box(std::vector<Interval>(4, Interval{-1, 1}), std::vector<std::size_t>(4, n));
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

TEST(ScalarTransport, ZeroFieldGivesOne) {
    const auto r = scalar_transport(catalog("zero"), circle(0, 0, 1), 0, 1);
    EXPECT_EQ(r.value, cd(1.0, 0.0));
}

TEST(ScalarTransport, ConstantFieldExact) {
    const PathCurve line = PathCurve::expression(kM, std::vector<std::string>{"s", "0", "0", "0"}, 0, 1);
    const auto r = scalar_transport(catalog("constant", {{"c", 1.0}}), line, 0, 1);
    EXPECT_NEAR(r.value.real(), std::exp(-1.0), 1e-15);
}

TEST(ScalarTransport, AgreesWithMatrixIntegrator) {
    const auto f = catalog("plane_wave", {{"eps", std::vector<double>{0.4, 1, -1, 0.3}}, {"k", std::vector<double>{1, 2, 0, 1}}});
    const PathCurve p = PathCurve::expression(kM, std::vector<std::string>{"s", "sin(s)", "s^2", "1 - s"}, 0, 1.5);
    const auto a = scalar_transport(f, p, 0.1, 1.4);
    const auto b = integrate_transport(f, p, 0.1, 1.4);
    EXPECT_LE(std::abs(a.value - b.matrix(0, 0)), 1e-8);
}

TEST(ScalarTransport, Multiplicative) {
    const auto f = catalog("uniform_B", {{"B", 1.3}});
    const PathCurve p = PathCurve::expression(kM, std::vector<std::string>{"0", "1 + s", "s^3 - s", "0"}, 0, 2);
    const auto rt = scalar_transport(f, p, 0.2, 1.8);
    const auto st = scalar_transport(f, p, 0.9, 1.8);
    const auto rs = scalar_transport(f, p, 0.2, 0.9);
    EXPECT_LE(std::abs(st.value * rs.value - rt.value), 1e-10);
}

TEST(Holonomy, UniformBUnitCircle) {
    const auto h = holonomy(catalog("uniform_B", {{"B", 1.0}}), circle(0, 0, 1));
    EXPECT_NEAR(h.value.real(), std::exp(-kPi), 1e-7);
}

TEST(Holonomy, AbFluxWindingAndNonEnclosing) {
    const auto f = catalog("ab_flux", {{"phi", 1.0}});
    EXPECT_NEAR(holonomy(f, circle(0.2, -0.1, 1)).value.real(), std::exp(-1.0), 1e-7);
    EXPECT_NEAR(std::abs(holonomy(f, circle(3, 0, 1)).value - 1.0), 0.0, 1e-9);
}

TEST(Holonomy, OpenLoopIsRejected) {
    const PathCurve open = PathCurve::expression(kM, std::vector<std::string>{"0", "cos(s)", "sin(s)", "0"}, 0, 3);
    EXPECT_EQ(kind_of([&] { holonomy(catalog("uniform_B", {{"B", 1.0}}), open); }), ErrorKind::Config);
}

TEST(ScalarGauge, ExpGaugeShiftsCoefficientByOne) {
    const PathCurve line = PathCurve::expression(kM, std::vector<std::string>{"s", "0", "0", "0"}, 0, 1);
    const Generator g = Generator::along(catalog("constant", {{"c", 0.5}}), line);
    const ScalarGauge a(PathFrameChange::scalar("exp(s)"));
    const Generator gp = a.transform(g);
    EXPECT_NEAR(std::abs(gp(0.3)(0, 0) - 1.5), 0.0, 1e-15);
    const auto direct = a.transform(scalar_transport(g, 0, 1).value, 0, 1);
    EXPECT_NEAR(std::abs(direct - std::exp(-1.5)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(scalar_transport(gp, 0, 1).value - std::exp(-1.5)), 0.0, 1e-12);
}

TEST(ScalarGauge, ZeroOfGaugeIsSingular) {
    const PathCurve line = PathCurve::expression(kM, std::vector<std::string>{"s", "0", "0", "0"}, 0, 1);
    const ScalarGauge a(PathFrameChange::scalar("s - 0.5"));
    const Generator gp = a.transform(Generator::along(catalog("zero"), line));
    EXPECT_EQ(kind_of([&] { gp(0.5); }), ErrorKind::Singularity);
}

TEST(ScalarGauge, HolonomyInvariantUnderSingleValuedGauge) {
    const auto f = catalog("uniform_B", {{"B", 0.7}});
    const PathCurve loop = circle(0.3, 0.1, 0.8);
    const ScalarGauge a(ScalarFieldFn(kM, "2 + sin(x1)*x2"), loop);
    const Generator gp = a.transform(Generator::along(f, loop));
    EXPECT_LE(std::abs(scalar_transport(gp, 0, 1).value - holonomy(f, loop).value), 1e-9);
}

TEST(NormalFrame, ZeroFieldTrivial) {
    const auto r = solve_normal_frame(catalog("zero"), cube(3), {0, 0, 0, 0});
    for (const auto& v : r.f0) EXPECT_EQ(v, cd(0.0, 0.0));
    EXPECT_EQ(r.residual, 0.0);
}

TEST(NormalFrame, RecoversAnalyticPotential) {
    const auto r = solve_normal_frame(catalog("pure_gauge", {{"f0", std::string("x1*x2")}}), cube(5), {0, 0, 0, 0});
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        EXPECT_NEAR(std::abs(r.f0[i] - r.points[i][1] * r.points[i][2]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(r.gauge[i] - std::exp(-r.f0[i])), 0.0, 0.0);
    }
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_LE(r.transformed_max, 1e-12);
    EXPECT_LE(r.path_independence_defect, 1e-12);
}

TEST(NormalFrame, ResidualShrinksQuadraticallyWithLattice) {
    const auto f = catalog("pure_gauge", {{"f0", std::string("sin(x1)*x2 + exp(x3)")}});
    std::vector<double> h, res;
    for (std::size_t n : {5, 9, 13}) {
        const auto r = solve_normal_frame(f, cube(n), {0, 0, 0, 0}, kDefaultFlatnessTol, {101});
        h.push_back(2.0 / static_cast<double>(n - 1));
        res.push_back(r.residual);
        EXPECT_LE(r.transformed_max, 1e-8);
    }
    EXPECT_NEAR(oracle::log_slope(h, res), 2.0, 0.3);
}

TEST(NormalFrame, CurvedRegionFailsTheGate) {
    try {
        solve_normal_frame(catalog("uniform_B", {{"B", 1.0}}), cube(3), {0, 0, 0, 0});
        FAIL() << "expected a gate error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Gate);
        EXPECT_NE(std::string(e.what()).find("R_12"), std::string::npos);
    }
}

TEST(NormalFrame, BasepointOutsideRegion) {
    EXPECT_EQ(kind_of([] { solve_normal_frame(catalog("zero"), cube(3), {0, 0, 0, 2}); }), ErrorKind::Config);
}

TEST(NormalFrame, SerialAndParallelAgreeBitForBit) {
    const auto f = catalog("pure_gauge", {{"f0", std::string("x0*x1 + sin(x2 + x3)")}});
    const auto a = solve_normal_frame(f, cube(4), {0, 0, 0, 0}, kDefaultFlatnessTol, {101, Exec::Serial});
    const auto b = solve_normal_frame(f, cube(4), {0, 0, 0, 0}, kDefaultFlatnessTol, {101, Exec::Parallel});
    EXPECT_EQ(a.f0, b.f0);
    EXPECT_EQ(a.transformed_max, b.transformed_max);
    EXPECT_EQ(a.residual, b.residual);
}
