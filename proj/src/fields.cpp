#include "pathtrans/fields.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "pathtrans/error.hpp"

namespace pathtrans {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string location_of(std::span<const double> x) {
    std::string out = "(";
    for (std::size_t i = 0; i < x.size(); ++i) out += (i ? ", " : "") + fmt(x[i]);
    return out + ")";
}

void check_uses_coordinates(const Expression& e, const ChartedSpace& space, const char* what) {
    for (const auto& v : e.free_variables()) {
        bool known = false;
        for (const auto& n : space.names()) known = known || n == v;
        if (!known) fail(ErrorKind::Config, std::string(what) + " uses '" + v + "', which is not a chart coordinate");
    }
}

std::vector<cd> to_complex(std::span<const double> x) {
    std::vector<cd> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = cd(x[i], 0.0);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CoefficientField::CoefficientField(ChartedSpace space, std::size_t fibre_dim,
                                   std::vector<std::vector<Expression>> components, std::optional<AxisGuard> guard,
                                   std::string label) {
    if (fibre_dim == 0) fail(ErrorKind::Config, "fibre dimension must be positive");
    if (components.size() != space.dim()) {
        fail(ErrorKind::Config, "field has " + std::to_string(components.size()) + " direction blocks, expected " +
                                    std::to_string(space.dim()));
    }
    auto impl = std::make_shared<Impl>(Impl{std::move(space), fibre_dim, std::move(components), {}, guard,
                                            std::move(label)});
    for (const auto& blk : impl->components) {
        if (blk.size() != fibre_dim * fibre_dim) {
            fail(ErrorKind::Config, "field block has " + std::to_string(blk.size()) + " entries, expected " +
                                        std::to_string(fibre_dim * fibre_dim));
        }
        for (const auto& e : blk) {
            check_uses_coordinates(e, impl->space, "field component");
            impl->programs.emplace_back(e, impl->space.names());
        }
    }
    if (guard && (guard->a >= impl->space.dim() || guard->b >= impl->space.dim())) {
        fail(ErrorKind::Config, "axis guard refers to a coordinate outside the chart");
    }
    impl_ = std::move(impl);
}

void CoefficientField::check_regular(std::span<const double> x) const {
    const auto& g = impl_->guard;
    if (!g) return;
    const double rho2 = x[g->a] * x[g->a] + x[g->b] * x[g->b];
    if (rho2 < g->min_rho2) {
        fail(ErrorKind::Singularity, "field '" + impl_->label + "' is singular on the axis " +
                                         impl_->space.names()[g->a] + "=" + impl_->space.names()[g->b] + "=0",
             location_of(x));
    }
}

void CoefficientField::evaluate_into(std::span<const double> x, std::span<cd> out) const {
    check_regular(x);
    const auto args = to_complex(x);
    const auto& progs = impl_->programs;
    for (std::size_t i = 0; i < progs.size(); ++i) {
        cd v;
        try {
            v = progs[i](args);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string("field '") + impl_->label + "': " + e.what(), location_of(x));
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            fail(ErrorKind::Numerical, "field '" + impl_->label + "' is not finite", location_of(x));
        }
        out[i] = v;
    }
}

std::vector<Mat> CoefficientField::evaluate(const Point& x) const {
    impl_->space.check_point(x);
    const std::size_t k = impl_->k;
    std::vector<cd> flat(dim() * k * k);
    evaluate_into(x, flat);
    std::vector<Mat> out(dim(), Mat(k, k));
    for (std::size_t mu = 0; mu < dim(); ++mu) {
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) out[mu](i, j) = flat[mu * k * k + i * k + j];
        }
    }
    return out;
}

Mat CoefficientField::contract(std::span<const double> x, std::span<const double> v) const {
    const std::size_t k = impl_->k;
    std::vector<cd> flat(dim() * k * k);
    evaluate_into(x, flat);
    Mat out = Mat::Zero(k, k);
    for (std::size_t mu = 0; mu < dim(); ++mu) {
        if (v[mu] == 0.0) continue;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) out(i, j) += flat[mu * k * k + i * k + j] * v[mu];
        }
    }
    return out;
}

FieldJacobian::FieldJacobian(const CoefficientField& field) : field_(field) {
    const std::size_t n = field.dim();
    const std::size_t k = field.fibre_dim();
    for (std::size_t mu = 0; mu < n; ++mu) {
        for (std::size_t nu = 0; nu < n; ++nu) {
            for (std::size_t e = 0; e < k * k; ++e) {
                partials_.push_back(differentiate(field.block(mu)[e], field.space().names()[nu]));
                programs_.emplace_back(partials_.back(), field.space().names());
            }
        }
    }
}

const Expression& FieldJacobian::partial(std::size_t mu, std::size_t nu, std::size_t i, std::size_t j) const {
    const std::size_t k = field_.fibre_dim();
    return partials_[(mu * field_.dim() + nu) * k * k + i * k + j];
}

void FieldJacobian::evaluate_into(std::span<const double> x, std::span<cd> out) const {
    field_.check_regular(x);
    const auto args = to_complex(x);
    for (std::size_t i = 0; i < programs_.size(); ++i) {
        cd v;
        try {
            v = programs_[i](args);
        } catch (const Error& e) {
            throw Error(e.kind(), std::string("derivative of field '") + field_.label() + "': " + e.what(),
                        location_of(x));
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            fail(ErrorKind::Numerical, "derivative of field '" + field_.label() + "' is not finite", location_of(x));
        }
        out[i] = v;
    }
}

Mat pullback_on_piece(const CoefficientField& field, const PathCurve& path, double s, std::size_t piece) {
    if (!(path.space() == field.space())) fail(ErrorKind::Config, "path and field live on different charts");
    const Point x = path.eval(s);
    const Vector v = path.tangent_on_piece(s, piece);
    return field.contract(x, v);
}

Mat pullback(const CoefficientField& field, const PathCurve& path, double s) {
    if (!(path.space() == field.space())) fail(ErrorKind::Config, "path and field live on different charts");
    const Point x = path.eval(s);
    const Vector v = path.tangent(s);
    return field.contract(x, v);
}

// ---------------------------------------------------------------------------

ScalarFieldFn::ScalarFieldFn(ChartedSpace space, Expression body)
    : space_(std::make_shared<const ChartedSpace>(std::move(space))), body_(std::move(body)) {
    check_uses_coordinates(body_, *space_, "scalar field");
    program_ = Program(body_, space_->names());
    for (const auto& name : space_->names()) {
        partials_.push_back(differentiate(body_, name));
        partial_programs_.emplace_back(partials_.back(), space_->names());
    }
}

ScalarFieldFn::ScalarFieldFn(ChartedSpace space, const std::string& body) : ScalarFieldFn(std::move(space), parse(body)) {}

cd ScalarFieldFn::operator()(std::span<const double> x) const { return program_(to_complex(x)); }

cd ScalarFieldFn::partial_at(std::size_t mu, std::span<const double> x) const {
    return partial_programs_[mu](to_complex(x));
}

// ---------------------------------------------------------------------------

PathFrameChange::PathFrameChange(std::size_t k, std::vector<Expression> entries) : k_(k), entries_(std::move(entries)) {
    if (k_ == 0 || entries_.size() != k_ * k_) fail(ErrorKind::Config, "path frame change must have k*k entries");
    const std::vector<std::string> vars{PathCurve::kParameter};
    for (const auto& e : entries_) {
        for (const auto& v : e.free_variables()) {
            if (v != PathCurve::kParameter) {
                fail(ErrorKind::Config, "path frame change uses '" + v + "', expected only 's'");
            }
        }
        programs_.emplace_back(e, vars);
        derivative_programs_.emplace_back(differentiate(e, PathCurve::kParameter), vars);
    }
}

PathFrameChange PathFrameChange::scalar(const Expression& a) { return PathFrameChange(1, {a}); }
PathFrameChange PathFrameChange::scalar(const std::string& a) { return PathFrameChange(1, {parse(a)}); }

PathFrameChange PathFrameChange::identity(std::size_t k) {
    std::vector<Expression> e(k * k);
    for (std::size_t i = 0; i < k; ++i) e[i * k + i] = Expression::number(1.0);
    return PathFrameChange(k, std::move(e));
}

Mat PathFrameChange::value(double s) const {
    const cd arg[1] = {cd(s, 0.0)};
    Mat out(k_, k_);
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) out(i, j) = programs_[i * k_ + j](arg);
    }
    return out;
}

Mat PathFrameChange::derivative(double s) const {
    const cd arg[1] = {cd(s, 0.0)};
    Mat out(k_, k_);
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) out(i, j) = derivative_programs_[i * k_ + j](arg);
    }
    return out;
}

Mat PathFrameChange::inverse(double s) const { return checked_inverse(value(s), "frame change A(s)"); }

// ---------------------------------------------------------------------------

FrameChange FrameChange::scalar(const ChartedSpace& space, Expression a) {
    check_uses_coordinates(a, space, "frame change");
    FrameChange c;
    c.space_ = std::make_shared<const ChartedSpace>(space);
    c.k_ = 1;
    c.scalar_ = true;
    c.a_ = {std::move(a)};
    return c;
}

FrameChange FrameChange::matrix(const ChartedSpace& space, std::size_t k, std::vector<Expression> entries) {
    if (k == 0 || entries.size() != k * k) fail(ErrorKind::Config, "frame change must have k*k entries");
    for (const auto& e : entries) check_uses_coordinates(e, space, "frame change");
    FrameChange c;
    c.space_ = std::make_shared<const ChartedSpace>(space);
    c.k_ = k;
    c.scalar_ = k == 1;
    c.a_ = std::move(entries);
    return c;
}

FrameChange FrameChange::identity(const ChartedSpace& space, std::size_t k) {
    std::vector<Expression> e(k * k);
    for (std::size_t i = 0; i < k; ++i) e[i * k + i] = Expression::number(1.0);
    return matrix(space, k, std::move(e));
}

FrameChange FrameChange::with_base(std::vector<Expression> b) const {
    const std::size_t n = space_->dim();
    if (b.size() != n * n) fail(ErrorKind::Config, "base frame change must have dim*dim entries");
    for (const auto& e : b) check_uses_coordinates(e, *space_, "base frame change");
    FrameChange c = *this;
    c.b_ = std::move(b);
    return c;
}

// ---------------------------------------------------------------------------
// Catalog

const std::vector<CatalogEntry>& catalog_entries() {
    static const std::vector<CatalogEntry> entries{
        {"ab_flux", {"phi"}, "thin solenoid along the x3 axis: flat off-axis, holonomy exp(-phi) per winding"},
        {"constant", {"c"}, "k=1, Gamma_0 = c, other directions zero"},
        {"plane_wave", {"eps", "k"}, "A_mu = eps_mu cos(k_nu x^nu)"},
        {"pure_gauge", {"f0"}, "k=1, A_mu = d f0 / d x^mu (flat everywhere)"},
        {"rotation2d", {"omega"}, "k=2, Gamma_0 = [[0, -omega], [omega, 0]]"},
        {"slice_demo", {}, "A = (0, 0, 0, x1): flat on x3-frozen slices, curved globally"},
        {"uniform_B", {"B"}, "A_1 = -B x2/2, A_2 = B x1/2 (constant field strength F_12 = B)"},
        {"zero", {"k"}, "all coefficients zero (k optional, default 1)"},
    };
    return entries;
}

namespace {

double number_param(const Params& p, const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto it = p.find(key);
    if (it == p.end()) {
        if (fallback) return *fallback;
        fail(ErrorKind::Config, "missing catalog parameter '" + key + "'", "params." + key);
    }
    if (const double* v = std::get_if<double>(&it->second)) {
        if (!std::isfinite(*v)) fail(ErrorKind::Config, "catalog parameter '" + key + "' must be finite", "params." + key);
        return *v;
    }
    fail(ErrorKind::Config, "catalog parameter '" + key + "' must be a number", "params." + key);
}

std::string string_param(const Params& p, const std::string& key) {
    auto it = p.find(key);
    if (it == p.end()) fail(ErrorKind::Config, "missing catalog parameter '" + key + "'", "params." + key);
    if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
    fail(ErrorKind::Config, "catalog parameter '" + key + "' must be an expression string", "params." + key);
}

std::vector<double> vector_param(const Params& p, const std::string& key, std::size_t n) {
    auto it = p.find(key);
    if (it == p.end()) fail(ErrorKind::Config, "missing catalog parameter '" + key + "'", "params." + key);
    const auto* v = std::get_if<std::vector<double>>(&it->second);
    if (!v || v->size() != n) {
        fail(ErrorKind::Config, "catalog parameter '" + key + "' must be a list of " + std::to_string(n) + " numbers",
             "params." + key);
    }
    return *v;
}

void require_dim(const ChartedSpace& space, std::size_t n, const std::string& name) {
    if (space.dim() < n) {
        fail(ErrorKind::Config, "catalog field '" + name + "' needs a chart of dimension >= " + std::to_string(n));
    }
}

}  // namespace

CoefficientField catalog(const std::string& name, const Params& params, const ChartedSpace& space) {
    const CatalogEntry* entry = nullptr;
    for (const auto& e : catalog_entries()) {
        if (e.name == name) entry = &e;
    }
    if (!entry) fail(ErrorKind::Config, "unknown catalog field '" + name + "'", "catalog");
    for (const auto& [key, value] : params) {
        if (std::find(entry->params.begin(), entry->params.end(), key) == entry->params.end()) {
            fail(ErrorKind::Config, "catalog field '" + name + "' has no parameter '" + key + "'", "params." + key);
        }
    }

    const std::size_t n = space.dim();
    auto x = [&](std::size_t mu) { return Expression::variable(space.names()[mu]); };
    auto num = [](double v) { return Expression::number(v); };
    auto scalar_field = [&](std::vector<Expression> a, std::optional<AxisGuard> guard = std::nullopt) {
        std::vector<std::vector<Expression>> blocks;
        for (auto& e : a) blocks.push_back({std::move(e)});
        return CoefficientField(space, 1, std::move(blocks), guard, name);
    };

    if (name == "zero") {
        const double kk = number_param(params, "k", 1.0);
        if (kk < 1 || kk != std::floor(kk) || kk > 64) fail(ErrorKind::Config, "zero: k must be a positive integer");
        const auto k = static_cast<std::size_t>(kk);
        return CoefficientField(space, k, std::vector<std::vector<Expression>>(n, std::vector<Expression>(k * k)),
                                std::nullopt, name);
    }
    if (name == "constant") {
        std::vector<Expression> a(n);
        a[0] = num(number_param(params, "c"));
        return scalar_field(std::move(a));
    }
    if (name == "pure_gauge") {
        const Expression f0 = parse(string_param(params, "f0"));
        check_uses_coordinates(f0, space, "pure_gauge f0");
        std::vector<Expression> a;
        for (std::size_t mu = 0; mu < n; ++mu) a.push_back(differentiate(f0, space.names()[mu]));
        return scalar_field(std::move(a));
    }
    if (name == "uniform_B") {
        require_dim(space, 3, name);
        const double b = number_param(params, "B");
        std::vector<Expression> a(n);
        a[1] = num(-b / 2.0) * x(2);
        a[2] = num(b / 2.0) * x(1);
        return scalar_field(std::move(a));
    }
    if (name == "ab_flux") {
        require_dim(space, 3, name);
        const double phi = number_param(params, "phi");
        const Expression strength = num(phi / (2.0 * std::numbers::pi));
        const Expression rho2 = pow(x(1), 2) + pow(x(2), 2);
        std::vector<Expression> a(n);
        a[1] = -(strength * x(2)) / rho2;
        a[2] = strength * x(1) / rho2;
        return scalar_field(std::move(a), AxisGuard{1, 2, 1e-12});
    }
    if (name == "plane_wave") {
        const auto eps = vector_param(params, "eps", n);
        const auto k = vector_param(params, "k", n);
        Expression phase;
        for (std::size_t mu = 0; mu < n; ++mu) phase = phase + num(k[mu]) * x(mu);
        std::vector<Expression> a(n);
        for (std::size_t mu = 0; mu < n; ++mu) a[mu] = num(eps[mu]) * cos(phase);
        return scalar_field(std::move(a));
    }
    if (name == "slice_demo") {
        require_dim(space, 4, name);
        std::vector<Expression> a(n);
        a[3] = x(1);
        return scalar_field(std::move(a));
    }
    // rotation2d
    const double omega = number_param(params, "omega");
    std::vector<std::vector<Expression>> blocks(n, std::vector<Expression>(4));
    blocks[0][1] = num(-omega);
    blocks[0][2] = num(omega);
    return CoefficientField(space, 2, std::move(blocks), std::nullopt, name);
}

}  // namespace pathtrans
