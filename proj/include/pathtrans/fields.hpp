#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pathtrans/expr.hpp"
#include "pathtrans/geometry.hpp"
#include "pathtrans/linalg.hpp"

namespace pathtrans {

/// Codimension-2 singular set {x^a = 0, x^b = 0}; evaluation closer than
/// sqrt(min_rho2) raises a singularity error.
struct AxisGuard {
    std::size_t a = 1;
    std::size_t b = 2;
    double min_rho2 = 1e-12;
};

/// Matrix-valued 3-index coefficients Gamma_mu(x), one k x k block of
/// expressions in the chart coordinates per base direction.
class CoefficientField {
public:
    /// components[mu][i * k + j] is the (i, j) entry of Gamma_mu.
    CoefficientField(ChartedSpace space, std::size_t fibre_dim, std::vector<std::vector<Expression>> components,
                     std::optional<AxisGuard> guard = std::nullopt, std::string label = "custom");

    const ChartedSpace& space() const { return impl_->space; }
    std::size_t dim() const { return impl_->space.dim(); }
    std::size_t fibre_dim() const { return impl_->k; }
    const std::string& label() const { return impl_->label; }
    const std::optional<AxisGuard>& guard() const { return impl_->guard; }

    const Expression& entry(std::size_t mu, std::size_t i, std::size_t j) const {
        return impl_->components[mu][i * impl_->k + j];
    }
    const std::vector<Expression>& block(std::size_t mu) const { return impl_->components[mu]; }

    /// Throws Error(Singularity) inside the guarded axis neighbourhood.
    void check_regular(std::span<const double> x) const;

    /// Gamma_mu(x) for every mu.
    std::vector<Mat> evaluate(const Point& x) const;

    /// Flat evaluation for hot loops: out[mu * k * k + i * k + j].
    void evaluate_into(std::span<const double> x, std::span<cd> out) const;

    /// Sum_mu Gamma_mu(x) v^mu.
    Mat contract(std::span<const double> x, std::span<const double> v) const;

private:
    struct Impl {
        ChartedSpace space;
        std::size_t k;
        std::vector<std::vector<Expression>> components;
        std::vector<Program> programs;  // flattened, same order as evaluate_into
        std::optional<AxisGuard> guard;
        std::string label;
    };
    std::shared_ptr<const Impl> impl_;
};

/// Compiled symbolic partials d Gamma_mu / d x^nu of a coefficient field.
class FieldJacobian {
public:
    explicit FieldJacobian(const CoefficientField& field);

    const CoefficientField& field() const { return field_; }
    const Expression& partial(std::size_t mu, std::size_t nu, std::size_t i, std::size_t j) const;

    /// out[(mu * dim + nu) * k * k + i * k + j].
    void evaluate_into(std::span<const double> x, std::span<cd> out) const;

private:
    CoefficientField field_;
    std::vector<Expression> partials_;
    std::vector<Program> programs_;
};

/// Pullback Gamma_mu(gamma(s)) gamma-dot^mu(s): the 2-index coefficient along the path.
Mat pullback(const CoefficientField& field, const PathCurve& path, double s);
Mat pullback_on_piece(const CoefficientField& field, const PathCurve& path, double s, std::size_t piece);

/// Scalar function of the chart coordinates.
class ScalarFieldFn {
public:
    ScalarFieldFn(ChartedSpace space, Expression body);
    ScalarFieldFn(ChartedSpace space, const std::string& body);

    const ChartedSpace& space() const { return *space_; }
    const Expression& body() const { return body_; }

    cd operator()(std::span<const double> x) const;
    /// Partial derivative along coordinate mu (symbolic).
    const Expression& partial(std::size_t mu) const { return partials_[mu]; }
    cd partial_at(std::size_t mu, std::span<const double> x) const;

private:
    std::shared_ptr<const ChartedSpace> space_;
    Expression body_;
    Program program_;
    std::vector<Expression> partials_;
    std::vector<Program> partial_programs_;
};

/// Path-wise frame change A(s; gamma): k x k expressions in the path parameter `s`.
class PathFrameChange {
public:
    PathFrameChange(std::size_t k, std::vector<Expression> entries);
    static PathFrameChange scalar(const Expression& a);
    static PathFrameChange scalar(const std::string& a);
    static PathFrameChange identity(std::size_t k);

    std::size_t fibre_dim() const { return k_; }
    Mat value(double s) const;
    Mat derivative(double s) const;
    /// A(s), throwing Error(Singularity) when det A(s) = 0.
    Mat inverse(double s) const;

private:
    std::size_t k_;
    std::vector<Expression> entries_;
    std::vector<Program> programs_;
    std::vector<Program> derivative_programs_;
};

/// Bundle frame change e'_i = A_i^j(x) e_j (scalar a(x) for k = 1, or a k x k
/// matrix) together with an optional base frame change E'_mu = B_mu^nu E_nu.
class FrameChange {
public:
    static FrameChange scalar(const ChartedSpace& space, Expression a);
    static FrameChange matrix(const ChartedSpace& space, std::size_t k, std::vector<Expression> entries);
    static FrameChange identity(const ChartedSpace& space, std::size_t k);

    /// B given row-major, b[mu * dim + nu] = B_mu^nu.
    FrameChange with_base(std::vector<Expression> b) const;

    const ChartedSpace& space() const { return *space_; }
    std::size_t fibre_dim() const { return k_; }
    bool is_scalar() const { return scalar_; }
    const std::vector<Expression>& bundle_entries() const { return a_; }
    const std::optional<std::vector<Expression>>& base() const { return b_; }

private:
    FrameChange() = default;
    std::shared_ptr<const ChartedSpace> space_;
    std::size_t k_ = 1;
    bool scalar_ = true;
    std::vector<Expression> a_;
    std::optional<std::vector<Expression>> b_;
};

// ---------------------------------------------------------------------------
// Catalog of named presets

using ParamValue = std::variant<double, std::string, std::vector<double>>;
using Params = std::map<std::string, ParamValue>;

struct CatalogEntry {
    std::string name;
    std::vector<std::string> params;
    std::string description;
};

/// Alphabetized preset listing.
const std::vector<CatalogEntry>& catalog_entries();

CoefficientField catalog(const std::string& name, const Params& params = {},
                         const ChartedSpace& space = ChartedSpace::minkowski4());

}  // namespace pathtrans
