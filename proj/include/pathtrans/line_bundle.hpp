#pragma once

// Line bundles (k = 1): transports are nonzero scalars exp(-integral of Gamma).

#include <optional>
#include <vector>

#include "pathtrans/curvature.hpp"
#include "pathtrans/fields.hpp"
#include "pathtrans/lattice.hpp"
#include "pathtrans/transport.hpp"

namespace pathtrans {

struct QuadratureOptions {
    std::size_t nodes = 401;  // composite Simpson nodes over the whole interval
};

struct ScalarTransport {
    cd value;              // L(t, s)
    cd exponent;           // integral of Gamma from s to t
    double est_error = 0;  // error estimate of value (Simpson step halving)
};

/// L(t, s) = exp(-integral_s^t Gamma(sigma) d sigma) by composite Simpson.
ScalarTransport scalar_transport(const Generator& gamma, double s, double t, const QuadratureOptions& opts = {});
ScalarTransport scalar_transport(const CoefficientField& field, const PathCurve& path, double s, double t,
                                 const QuadratureOptions& opts = {});

inline constexpr double kLoopClosureTol = 1e-12;

/// exp(-loop integral of omega) around a closed loop.
ScalarTransport holonomy(const CoefficientField& field, const PathCurve& loop, const QuadratureOptions& opts = {});

/// Scalar frame change e' = a e along a path, a(s) != 0.
class ScalarGauge {
public:
    /// a as an expression in the path parameter `s`.
    explicit ScalarGauge(PathFrameChange a);
    /// a(x) restricted to a path: a(gamma(s)), derivative by the chain rule.
    ScalarGauge(const ScalarFieldFn& a, const PathCurve& path);

    cd value(double s) const;
    cd derivative(double s) const;

    /// Gamma' = Gamma + d/ds ln a.
    Generator transform(const Generator& gamma) const;
    /// L' = a(s)/a(t) L for a transport from s to t.
    cd transform(cd l, double s, double t) const;

private:
    std::optional<PathFrameChange> path_form_;
    std::optional<ScalarFieldFn> field_form_;
    std::optional<PathCurve> path_;
};

struct NormalFrameOptions {
    std::size_t quad_nodes = 401;
    Exec exec = Exec::Parallel;
    double path_defect_limit = 1e-6;
};

struct NormalFrameResult {
    std::vector<Point> points;      // lattice points
    std::vector<cd> f0;             // potential f0 with f0(basepoint) = 0
    std::vector<cd> gauge;          // a = exp(-f0), frame e' = a e
    double residual = 0.0;          // max |A_mu - lattice difference of f0|
    double transformed_max = 0.0;   // max |A'_mu| = |A_mu - d f0/dx^mu| with d f0 by quadrature
    double path_independence_defect = 0.0;  // max |holonomy - 1| over probe loops
    FlatnessReport flatness;
};

/// Potential f0 with A_mu = d f0/dx^mu on a flat convex box, by straight-segment
/// line integrals from the basepoint. Error(Gate) when the region is not flat.
NormalFrameResult solve_normal_frame(const CoefficientField& field, const RegionSpec& region, const Point& basepoint,
                                     double tol = kDefaultFlatnessTol, const NormalFrameOptions& opts = {});

}  // namespace pathtrans
