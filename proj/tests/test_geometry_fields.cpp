#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pathtrans/error.hpp"
#include "pathtrans/fields.hpp"
#include "pathtrans/geometry.hpp"

using namespace pathtrans;

namespace {

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

TEST(Chart, MinkowskiDefaults) {
    const ChartedSpace m = ChartedSpace::minkowski4();
    EXPECT_EQ(m.dim(), 4u);
    EXPECT_EQ(m.index_of("x3"), 3u);
    EXPECT_EQ(m.inverse_metric_diag(), (std::vector<double>{1, -1, -1, -1}));
    EXPECT_EQ(raise_index(m, {1, 2, 3, 4}), (Vector{1, -2, -3, -4}));
}

TEST(Chart, RejectsBadDefinitions) {
    EXPECT_EQ(kind_of([] { ChartedSpace({"t", "t"}, {1, 1}); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { ChartedSpace({"s"}, {1}); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { ChartedSpace({"a", "b"}, {1, 0}); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { ChartedSpace({"a"}, {1, 1}); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { ChartedSpace::minkowski4().check_point({1, 2}); }), ErrorKind::Config);
}

TEST(Path, ExpressionEvalAndTangent) {
    const auto space = ChartedSpace::minkowski4();
    const PathCurve p = PathCurve::expression(space, std::vector<std::string>{"s", "cos(s)", "s^2", "0"}, 0, 2);
    const Point x = p.eval(0.5);
    EXPECT_DOUBLE_EQ(x[1], std::cos(0.5));
    const Vector v = p.tangent(0.5);
    EXPECT_DOUBLE_EQ(v[0], 1.0);
    EXPECT_DOUBLE_EQ(v[1], -std::sin(0.5));
    EXPECT_DOUBLE_EQ(v[2], 1.0);
    EXPECT_EQ(kind_of([&] { p.eval(2.5); }), ErrorKind::Domain);
    EXPECT_EQ(kind_of([&] { PathCurve::expression(space, std::vector<std::string>{"s", "t", "0", "0"}, 0, 1); }),
              ErrorKind::Config);
    EXPECT_EQ(kind_of([&] { PathCurve::expression(space, std::vector<std::string>{"s", "i*s", "0", "0"}, 0, 1).eval(1); }),
              ErrorKind::Evaluation);
}

TEST(Path, PolylineHitsVerticesExactly) {
    const auto space = ChartedSpace::euclidean(2);
    const PathCurve p = PathCurve::polyline(space, {{0, 0}, {1, 0}, {1, 3}}, 0, 1);
    EXPECT_EQ(p.eval(0.5), (Point{1, 0}));
    EXPECT_EQ(p.eval(1.0), (Point{1, 3}));
    EXPECT_EQ(p.breakpoints(), (std::vector<double>{0, 0.5, 1}));
    // right segment wins at an interior vertex
    EXPECT_EQ(p.tangent(0.5), (Vector{0, 6}));
    EXPECT_EQ(p.tangent_on_piece(0.5, 0), (Vector{2, 0}));
    EXPECT_EQ(p.piece_between(0.5, 1.0), 1u);
}

TEST(Path, ZeroLengthSegmentHasNoTangent) {
    const auto space = ChartedSpace::euclidean(2);
    const PathCurve p = PathCurve::polyline(space, {{0, 0}, {0, 0}, {1, 0}}, 0, 1);
    EXPECT_EQ(kind_of([&] { p.tangent(0.25); }), ErrorKind::Domain);
}

TEST(Catalog, ListsEightPresetsAlphabetically) {
    const auto& entries = catalog_entries();
    ASSERT_EQ(entries.size(), 8u);
    for (std::size_t i = 1; i < entries.size(); ++i) EXPECT_LT(entries[i - 1].name, entries[i].name);
}

TEST(Catalog, ParameterValidation) {
    EXPECT_EQ(kind_of([] { catalog("nope"); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { catalog("constant"); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { catalog("constant", {{"c", 1.0}, {"d", 2.0}}); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { catalog("constant", {{"c", std::string("x")}}); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { catalog("plane_wave", {{"eps", std::vector<double>{1, 0}}, {"k", std::vector<double>{1, 0, 0, 0}}}); }),
              ErrorKind::Config);
    EXPECT_EQ(kind_of([] { catalog("pure_gauge", {{"f0", std::string("x1*(")}}); }), ErrorKind::Syntax);
}

TEST(Catalog, UniformBComponents) {
    const auto f = catalog("uniform_B", {{"B", 2.0}});
    const auto g = f.evaluate({0, 3, 5, 0});
    EXPECT_EQ(g[1](0, 0), cd(-5.0, 0.0));
    EXPECT_EQ(g[2](0, 0), cd(3.0, 0.0));
    EXPECT_EQ(g[0](0, 0), cd(0.0, 0.0));
}

TEST(Catalog, AbFluxGuardsItsAxis) {
    const auto f = catalog("ab_flux", {{"phi", 1.0}});
    EXPECT_EQ(kind_of([&] { f.evaluate({0, 0, 0, 5}); }), ErrorKind::Singularity);
    EXPECT_EQ(kind_of([&] { f.evaluate({0, 1e-7, 0, 0}); }), ErrorKind::Singularity);
    const auto g = f.evaluate({0, 2, 0, 0});
    EXPECT_NEAR(g[2](0, 0).real(), 1.0 / (2 * std::numbers::pi) / 2.0, 1e-16);
}

TEST(Catalog, PureGaugeIsGradient) {
    const auto f = catalog("pure_gauge", {{"f0", std::string("x1*x2 + sin(x0)")}});
    const auto g = f.evaluate({0.3, 2, 5, 1});
    EXPECT_DOUBLE_EQ(g[0](0, 0).real(), std::cos(0.3));
    EXPECT_DOUBLE_EQ(g[1](0, 0).real(), 5.0);
    EXPECT_DOUBLE_EQ(g[2](0, 0).real(), 2.0);
    EXPECT_DOUBLE_EQ(g[3](0, 0).real(), 0.0);
}

TEST(Fields, PullbackContractsWithVelocity) {
    const auto space = ChartedSpace::minkowski4();
    const auto f = catalog("uniform_B", {{"B", 1.0}}, space);
    const PathCurve circle = PathCurve::expression(space, std::vector<std::string>{"0", "cos(s)", "sin(s)", "0"}, 0, 6);
    for (double s : {0.0, 0.7, 2.0, 5.5}) {
        // A_mu gamma-dot^mu = B/2 (x1^2 + x2^2) on the unit circle
        EXPECT_NEAR(std::abs(pullback(f, circle, s)(0, 0) - cd(0.5, 0.0)), 0.0, 1e-15);
    }
}

TEST(Fields, JacobianMatchesFiniteDifferences) {
    const auto f = catalog("plane_wave", {{"eps", std::vector<double>{0.2, 1, -0.5, 0}}, {"k", std::vector<double>{1, 0.5, 0, 1}}});
    const FieldJacobian jac(f);
    const Point p{0.1, -0.4, 0.8, 0.3};
    std::vector<cd> d(16);
    jac.evaluate_into(p, d);
    for (std::size_t mu = 0; mu < 4; ++mu) {
        for (std::size_t nu = 0; nu < 4; ++nu) {
            const cd fd = oracle::derivative(
                [&](double t) {
                    Point q = p;
                    q[nu] = t;
                    return f.evaluate(q)[mu](0, 0);
                },
                p[nu]);
            EXPECT_NEAR(std::abs(d[mu * 4 + nu] - fd), 0.0, 1e-10);
        }
    }
}

TEST(Fields, ScalarFunctionPartials) {
    const ScalarFieldFn f(ChartedSpace::minkowski4(), "x0*x1^2 - exp(x3)");
    const std::vector<double> p{2, 3, 0, 0};
    EXPECT_EQ(f(p), cd(17.0, 0.0));
    EXPECT_EQ(f.partial_at(1, p), cd(12.0, 0.0));
    EXPECT_EQ(f.partial_at(3, p), cd(-1.0, 0.0));
    EXPECT_EQ(kind_of([] { ScalarFieldFn(ChartedSpace::minkowski4(), "x9 + 1"); }), ErrorKind::Config);
}

TEST(Fields, PathFrameChangeInverseAndDerivative) {
    const PathFrameChange a(2, {parse("cos(s)"), parse("-sin(s)"), parse("sin(s)"), parse("cos(s)")});
    const Mat v = a.value(0.4);
    EXPECT_LE(oracle::max_abs(a.inverse(0.4) * v - Mat::Identity(2, 2)), 1e-15);
    const Mat fd = oracle::derivative([&](double s) { return a.value(s); }, 0.4);
    EXPECT_LE(oracle::max_abs(a.derivative(0.4) - fd), 1e-11);
    const PathFrameChange singular = PathFrameChange::scalar("s - 1");
    EXPECT_EQ(kind_of([&] { singular.inverse(1.0); }), ErrorKind::Singularity);
}
