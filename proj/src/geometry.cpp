#include "pathtrans/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "pathtrans/error.hpp"

namespace pathtrans {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double real_component(cd z, std::size_t mu) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        fail(ErrorKind::Numerical, "path component " + std::to_string(mu) + " is not finite");
    }
    if (std::abs(z.imag()) > 1e-12 * std::max(1.0, std::abs(z.real()))) {
        fail(ErrorKind::Evaluation, "path component " + std::to_string(mu) + " is not real");
    }
    return z.real();
}

}  // namespace

ChartedSpace::ChartedSpace(std::vector<std::string> names, std::vector<double> metric_diag)
    : names_(std::move(names)), metric_(std::move(metric_diag)) {
    if (names_.empty()) fail(ErrorKind::Config, "chart dimension must be at least 1");
    if (metric_.size() != names_.size()) {
        fail(ErrorKind::Config, "metric_diag has " + std::to_string(metric_.size()) + " entries, expected " +
                                    std::to_string(names_.size()));
    }
    std::set<std::string> seen;
    for (const auto& n : names_) {
        if (n.empty()) fail(ErrorKind::Config, "empty coordinate name");
        if (!seen.insert(n).second) fail(ErrorKind::Config, "duplicate coordinate name '" + n + "'");
        if (n == PathCurve::kParameter || n == "i" || n == "pi") {
            fail(ErrorKind::Config, "coordinate name '" + n + "' is reserved");
        }
    }
    for (double g : metric_) {
        if (g == 0.0 || !std::isfinite(g)) fail(ErrorKind::Config, "metric_diag entries must be finite and nonzero");
        inverse_metric_.push_back(1.0 / g);
    }
}

ChartedSpace ChartedSpace::minkowski4() { return ChartedSpace({"x0", "x1", "x2", "x3"}, {1.0, -1.0, -1.0, -1.0}); }

ChartedSpace ChartedSpace::euclidean(std::size_t dim) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i));
    return ChartedSpace(std::move(names), std::vector<double>(dim, 1.0));
}

std::size_t ChartedSpace::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    fail(ErrorKind::Config, "unknown coordinate '" + name + "'");
}

void ChartedSpace::check_point(const Point& p) const {
    if (p.size() != dim()) {
        fail(ErrorKind::Config, "point has " + std::to_string(p.size()) + " coordinates, expected " +
                                    std::to_string(dim()));
    }
    for (double x : p) {
        if (!std::isfinite(x)) fail(ErrorKind::Config, "point coordinates must be finite");
    }
}

Vector raise_index(const ChartedSpace& space, const Vector& covector) {
    if (covector.size() != space.dim()) fail(ErrorKind::Config, "covector length does not match chart dimension");
    Vector out(covector.size());
    for (std::size_t i = 0; i < covector.size(); ++i) out[i] = covector[i] / space.metric_diag()[i];
    return out;
}

// ---------------------------------------------------------------------------

PathCurve PathCurve::expression(const ChartedSpace& space, std::vector<Expression> components, double s_min,
                                double s_max) {
    if (components.size() != space.dim()) {
        fail(ErrorKind::Config, "path has " + std::to_string(components.size()) + " components, expected " +
                                    std::to_string(space.dim()));
    }
    if (!(s_min <= s_max) || !std::isfinite(s_min) || !std::isfinite(s_max)) {
        fail(ErrorKind::Config, "path domain must satisfy s_min <= s_max");
    }
    PathCurve p;
    p.space_ = std::make_shared<const ChartedSpace>(space);
    p.kind_ = Kind::Expression;
    p.s_min_ = s_min;
    p.s_max_ = s_max;
    const std::vector<std::string> vars{kParameter};
    p.id_ = "expr(";
    for (std::size_t mu = 0; mu < components.size(); ++mu) {
        for (const auto& v : components[mu].free_variables()) {
            if (v != kParameter) fail(ErrorKind::Config, "path component uses variable '" + v + "', expected 's'");
        }
        p.programs_.emplace_back(components[mu], vars);
        p.derivative_programs_.emplace_back(differentiate(components[mu], kParameter), vars);
        p.id_ += (mu ? "; " : "") + to_string(components[mu]);
    }
    p.id_ += ")[" + fmt(s_min) + ", " + fmt(s_max) + "]";
    p.components_ = std::move(components);
    return p;
}

PathCurve PathCurve::expression(const ChartedSpace& space, const std::vector<std::string>& components,
                                double s_min, double s_max) {
    std::vector<Expression> parsed;
    for (const auto& c : components) parsed.push_back(parse(c));
    return expression(space, std::move(parsed), s_min, s_max);
}

PathCurve PathCurve::polyline(const ChartedSpace& space, std::vector<Point> vertices, double s_min, double s_max) {
    if (vertices.size() < 2) fail(ErrorKind::Config, "polyline needs at least 2 vertices");
    if (!(s_min < s_max) || !std::isfinite(s_min) || !std::isfinite(s_max)) {
        fail(ErrorKind::Config, "polyline domain must satisfy s_min < s_max");
    }
    for (const auto& v : vertices) space.check_point(v);
    PathCurve p;
    p.space_ = std::make_shared<const ChartedSpace>(space);
    p.kind_ = Kind::Polyline;
    p.s_min_ = s_min;
    p.s_max_ = s_max;
    p.id_ = "poly(";
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        p.id_ += i ? "; " : "";
        for (std::size_t mu = 0; mu < vertices[i].size(); ++mu) p.id_ += (mu ? "," : "") + fmt(vertices[i][mu]);
    }
    p.id_ += ")[" + fmt(s_min) + ", " + fmt(s_max) + "]";
    p.vertices_ = std::move(vertices);
    return p;
}

void PathCurve::check_parameter(double s) const {
    if (!contains(s)) {
        fail(ErrorKind::Domain, "parameter " + fmt(s) + " outside path domain [" + fmt(s_min_) + ", " + fmt(s_max_) + "]",
             "s=" + fmt(s));
    }
}

double PathCurve::vertex_parameter(std::size_t i) const {
    if (i + 1 == vertices_.size()) return s_max_;
    return s_min_ + (s_max_ - s_min_) * static_cast<double>(i) / static_cast<double>(vertices_.size() - 1);
}

namespace {
// Position along the vertex index axis, snapped onto vertices so they evaluate exactly.
double vertex_coordinate(double s, double s_min, double s_max, std::size_t n) {
    double t = (s - s_min) / (s_max - s_min) * static_cast<double>(n - 1);
    double r = std::round(t);
    if (std::abs(t - r) < 1e-12) t = r;
    return std::clamp(t, 0.0, static_cast<double>(n - 1));
}
}  // namespace

Point PathCurve::eval(double s) const {
    check_parameter(s);
    Point out(space_->dim());
    if (kind_ == Kind::Expression) {
        const cd arg[1] = {cd(s, 0.0)};
        for (std::size_t mu = 0; mu < programs_.size(); ++mu) out[mu] = real_component(programs_[mu](arg), mu);
        return out;
    }
    const double t = vertex_coordinate(s, s_min_, s_max_, vertices_.size());
    const auto seg = std::min(static_cast<std::size_t>(t), vertices_.size() - 2);
    const double u = t - static_cast<double>(seg);
    if (u == 0.0) return vertices_[seg];
    if (u == 1.0) return vertices_[seg + 1];
    for (std::size_t mu = 0; mu < out.size(); ++mu) {
        out[mu] = vertices_[seg][mu] + u * (vertices_[seg + 1][mu] - vertices_[seg][mu]);
    }
    return out;
}

Vector PathCurve::tangent_on_piece(double s, std::size_t piece) const {
    check_parameter(s);
    Vector out(space_->dim());
    if (kind_ == Kind::Expression) {
        const cd arg[1] = {cd(s, 0.0)};
        for (std::size_t mu = 0; mu < derivative_programs_.size(); ++mu) {
            out[mu] = real_component(derivative_programs_[mu](arg), mu);
        }
        return out;
    }
    if (piece + 1 >= vertices_.size()) fail(ErrorKind::Domain, "polyline segment index out of range");
    const Point& a = vertices_[piece];
    const Point& b = vertices_[piece + 1];
    const double scale = static_cast<double>(vertices_.size() - 1) / (s_max_ - s_min_);
    double norm2 = 0.0;
    for (std::size_t mu = 0; mu < out.size(); ++mu) {
        out[mu] = (b[mu] - a[mu]) * scale;
        norm2 += (b[mu] - a[mu]) * (b[mu] - a[mu]);
    }
    if (norm2 == 0.0) {
        fail(ErrorKind::Domain, "polyline segment " + std::to_string(piece) + " has zero length (tangent undefined)",
             "segment=" + std::to_string(piece));
    }
    return out;
}

Vector PathCurve::tangent(double s) const {
    check_parameter(s);
    if (kind_ == Kind::Expression) return tangent_on_piece(s, 0);
    const double t = vertex_coordinate(s, s_min_, s_max_, vertices_.size());
    const auto seg = std::min(static_cast<std::size_t>(t), vertices_.size() - 2);
    return tangent_on_piece(s, seg);
}

std::vector<double> PathCurve::breakpoints() const {
    if (kind_ == Kind::Expression) return {s_min_, s_max_};
    std::vector<double> out;
    for (std::size_t i = 0; i < vertices_.size(); ++i) out.push_back(vertex_parameter(i));
    return out;
}

std::size_t PathCurve::piece_between(double a, double b) const {
    if (kind_ == Kind::Expression) return 0;
    const double t = vertex_coordinate(0.5 * (a + b), s_min_, s_max_, vertices_.size());
    return std::min(static_cast<std::size_t>(t), vertices_.size() - 2);
}

}  // namespace pathtrans
