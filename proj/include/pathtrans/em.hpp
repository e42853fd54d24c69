#pragma once

// Electromagnetic potentials read as 3-index coefficients of a line bundle transport.

#include <optional>
#include <vector>

#include "pathtrans/fields.hpp"
#include "pathtrans/line_bundle.hpp"

namespace pathtrans {

enum class CouplingKind { Real, U1 };

/// Real: Gamma_mu = A_mu.  U1: Gamma_mu = i q A_mu.
struct Coupling {
    CouplingKind kind = CouplingKind::Real;
    double charge = 1.0;

    static Coupling real() { return {}; }
    static Coupling u1(double q) { return {CouplingKind::U1, q}; }
};

/// A_mu on a 4-dimensional chart, stored as a k = 1 coefficient field.
class Potential {
public:
    explicit Potential(CoefficientField a, Coupling coupling = {});

    const CoefficientField& field() const { return a_; }
    const ChartedSpace& space() const { return a_.space(); }
    const Coupling& coupling() const { return coupling_; }
    const Expression& component(std::size_t mu) const { return a_.entry(mu, 0, 0); }

    Potential with_coupling(Coupling c) const { return Potential(a_, c); }

    /// Coefficients of the transport this potential defines under its coupling.
    CoefficientField transport_field() const { return transport_field(coupling_); }
    CoefficientField transport_field(const Coupling& c) const;

private:
    CoefficientField a_;
    Coupling coupling_;
};

/// F_mu_nu = -d A_mu/dx^nu + d A_nu/dx^mu at a point.
struct FieldTensorAtPoint {
    Point point;
    std::size_t dim = 0;
    std::vector<cd> components;  // components[mu * dim + nu]

    cd at(std::size_t mu, std::size_t nu) const { return components[mu * dim + nu]; }
};

FieldTensorAtPoint field_tensor(const Potential& a, const Point& p);

/// A'_mu = B_mu^nu (A_nu + d lambda/dx^nu); B row-major, identity when absent.
Potential gauge_transform(const Potential& a, const ScalarFieldFn& lambda,
                          const std::optional<std::vector<Expression>>& b = std::nullopt);

enum class GaugeCondition { Lorenz, Coulomb, Hamilton, Axial };

GaugeCondition parse_gauge_condition(const std::string& name);
const char* to_string(GaugeCondition c);

/// Residual of the condition on A at p (zero iff it holds there).
cd gauge_residual(const Potential& a, GaugeCondition c, const Point& p);
/// Residual of the condition on lambda that keeps the gauge.
cd lambda_condition_residual(const ScalarFieldFn& lambda, GaugeCondition c, const Point& p);
/// Residual of the condition on phi, the freedom lambda -> lambda + phi.
cd phi_condition_residual(const ScalarFieldFn& phi, const ScalarFieldFn& lambda, GaugeCondition c, const Point& p);

struct InertialFrameResult {
    NormalFrameResult normal;
    std::vector<cd> lambda;  // lambda = -f0 on the lattice
    cd scale{1.0, 0.0};      // constant b != 0 of the strong normal family
    std::vector<cd> gauge;   // a = b exp(lambda)
};

/// Frame in which A vanishes on the box. Error(Gate) names the offending F component.
InertialFrameResult solve_inertial_frame(const Potential& a, const RegionSpec& region, const Point& basepoint,
                                         double tol = kDefaultFlatnessTol, const NormalFrameOptions& opts = {},
                                         cd scale = cd(1.0, 0.0));

/// Loop holonomy of the transport under the given coupling.
ScalarTransport ab_phase(const Potential& a, const PathCurve& loop, const Coupling& coupling,
                         const QuadratureOptions& opts = {});

struct StokesOptions {
    std::size_t surface_nodes = 101;  // Simpson nodes per surface direction
    QuadratureOptions quad;
};

struct StokesResult {
    cd loop_integral;
    cd flux_integral;
    double defect = 0.0;
    std::size_t axis_a = 0;
    std::size_t axis_b = 1;
};

/// Loop integral of A against the flux of F through the planar region the loop bounds.
/// The loop must lie in a coordinate 2-plane and be star-shaped about its centroid.
StokesResult stokes_check(const Potential& a, const PathCurve& loop, const StokesOptions& opts = {});

}  // namespace pathtrans
