#include "pathtrans/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "pathtrans/curvature.hpp"
#include "pathtrans/em.hpp"
#include "pathtrans/fields.hpp"
#include "pathtrans/line_bundle.hpp"
#include "pathtrans/transport.hpp"

namespace pathtrans {

using json = nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(ErrorKind::Config, "missing required entry '" + key + "'", join(where, key));
    return obj.at(key);
}

double as_number(const json& j, const std::string& loc) {
    if (!j.is_number()) fail(ErrorKind::Config, "expected a number", loc);
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ErrorKind::Config, "expected a finite number", loc);
    return v;
}

std::size_t as_count(const json& j, const std::string& loc) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(ErrorKind::Config, "expected a non-negative integer", loc);
    return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& loc) {
    if (!j.is_string()) fail(ErrorKind::Config, "expected a string", loc);
    return j.get<std::string>();
}

std::vector<double> as_numbers(const json& j, const std::string& loc) {
    if (!j.is_array()) fail(ErrorKind::Config, "expected an array of numbers", loc);
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], loc + "[" + std::to_string(i) + "]"));
    return out;
}

Point as_point(const json& j, const ChartedSpace& space, const std::string& loc) {
    Point p = as_numbers(j, loc);
    if (p.size() != space.dim()) {
        fail(ErrorKind::Config, "point needs " + std::to_string(space.dim()) + " coordinates", loc);
    }
    return p;
}

Expression parse_at(const std::string& text, const std::string& loc) {
    try {
        return parse(text);
    } catch (const Error& e) {
        fail(e.kind(), e.what(), loc);
    }
}

std::size_t axis_index(const json& j, const ChartedSpace& space, const std::string& loc) {
    if (j.is_string()) {
        try {
            return space.index_of(j.get<std::string>());
        } catch (const Error& e) {
            fail(ErrorKind::Config, e.what(), loc);
        }
    }
    const std::size_t a = as_count(j, loc);
    if (a >= space.dim()) fail(ErrorKind::Config, "axis index outside the chart", loc);
    return a;
}

json cplx(cd z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(cplx(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json point_json(const Point& p) { return json(p); }

// ---------------------------------------------------------------------------
// configuration blocks

ChartedSpace parse_chart(const json& cfg) {
    if (!cfg.contains("chart")) return ChartedSpace::minkowski4();
    const json& c = cfg.at("chart");
    std::vector<std::string> names;
    if (c.contains("names")) {
        const json& n = c.at("names");
        if (!n.is_array()) fail(ErrorKind::Config, "expected an array of names", "chart.names");
        for (std::size_t i = 0; i < n.size(); ++i) names.push_back(as_string(n[i], "chart.names[" + std::to_string(i) + "]"));
    }
    if (c.contains("dim")) {
        const std::size_t dim = as_count(c.at("dim"), "chart.dim");
        if (names.empty()) {
            for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i));
        } else if (names.size() != dim) {
            fail(ErrorKind::Config, "chart.dim does not match the number of names", "chart.dim");
        }
    }
    if (names.empty()) fail(ErrorKind::Config, "chart needs 'dim' or 'names'", "chart");
    std::vector<double> metric;
    if (c.contains("metric_diag")) {
        metric = as_numbers(c.at("metric_diag"), "chart.metric_diag");
    } else if (names.size() == 4) {
        metric = {1.0, -1.0, -1.0, -1.0};
    } else {
        metric.assign(names.size(), 1.0);
    }
    try {
        return ChartedSpace(names, metric);
    } catch (const Error& e) {
        fail(e.kind(), e.what(), "chart");
    }
}

Params parse_params(const json& p, const std::string& loc) {
    Params out;
    if (p.is_null()) return out;
    if (!p.is_object()) fail(ErrorKind::Config, "expected an object of parameters", loc);
    for (const auto& [key, value] : p.items()) {
        const std::string where = loc + "." + key;
        if (value.is_number()) {
            out[key] = as_number(value, where);
        } else if (value.is_string()) {
            out[key] = value.get<std::string>();
        } else if (value.is_array()) {
            out[key] = as_numbers(value, where);
        } else {
            fail(ErrorKind::Config, "parameter must be a number, string or array of numbers", where);
        }
    }
    return out;
}

CoefficientField parse_field(const json& cfg, const ChartedSpace& space, const Params* override_params = nullptr) {
    const json& f = require(cfg, "field", "");
    if (f.contains("catalog")) {
        const std::string name = as_string(f.at("catalog"), "field.catalog");
        Params params = parse_params(f.contains("params") ? f.at("params") : json(), "field.params");
        if (override_params) {
            for (const auto& [k, v] : *override_params) params[k] = v;
        }
        try {
            return catalog(name, params, space);
        } catch (const Error& e) {
            fail(e.kind(), e.what(), e.location().empty() ? "field" : "field." + e.location());
        }
    }
    if (!f.contains("components")) fail(ErrorKind::Config, "field needs 'catalog' or 'components'", "field");
    const std::size_t k = f.contains("k") ? as_count(f.at("k"), "field.k") : 1;
    if (k == 0) fail(ErrorKind::Config, "fibre dimension must be at least 1", "field.k");
    const json& comps = f.at("components");
    if (!comps.is_array() || comps.size() != space.dim()) {
        fail(ErrorKind::Config, "field.components needs one entry per coordinate", "field.components");
    }
    std::vector<std::vector<Expression>> blocks;
    for (std::size_t mu = 0; mu < comps.size(); ++mu) {
        const std::string where = "field.components[" + std::to_string(mu) + "]";
        std::vector<Expression> block;
        if (comps[mu].is_string() && k == 1) {
            block.push_back(parse_at(comps[mu].get<std::string>(), where));
        } else {
            if (!comps[mu].is_array() || comps[mu].size() != k * k) {
                fail(ErrorKind::Config, "expected k*k expressions in row-major order", where);
            }
            for (std::size_t e = 0; e < k * k; ++e) {
                const std::string at = where + "[" + std::to_string(e) + "]";
                block.push_back(parse_at(as_string(comps[mu][e], at), at));
            }
        }
        blocks.push_back(std::move(block));
    }
    std::optional<AxisGuard> guard;
    if (f.contains("guard")) {
        const json& g = f.at("guard");
        AxisGuard ag;
        ag.a = axis_index(require(g, "a", "field.guard"), space, "field.guard.a");
        ag.b = axis_index(require(g, "b", "field.guard"), space, "field.guard.b");
        if (g.contains("min_rho2")) ag.min_rho2 = as_number(g.at("min_rho2"), "field.guard.min_rho2");
        guard = ag;
    }
    try {
        return CoefficientField(space, k, std::move(blocks), guard, "custom");
    } catch (const Error& e) {
        fail(e.kind(), e.what(), "field");
    }
}

PathCurve parse_path(const json& p, const ChartedSpace& space, const std::string& where) {
    if (!p.is_object()) fail(ErrorKind::Config, "expected a path object", where);
    const std::string kind = p.contains("kind") ? as_string(p.at("kind"), join(where, "kind")) : "expression";
    double lo = 0.0;
    double hi = 1.0;
    if (p.contains("domain")) {
        const auto d = as_numbers(p.at("domain"), join(where, "domain"));
        if (d.size() != 2) fail(ErrorKind::Config, "domain must be [s_min, s_max]", join(where, "domain"));
        lo = d[0];
        hi = d[1];
    }
    try {
        if (kind == "expression") {
            const json& comps = require(p, "components", where);
            if (!comps.is_array()) fail(ErrorKind::Config, "expected an array of expressions", join(where, "components"));
            std::vector<Expression> parsed;
            for (std::size_t i = 0; i < comps.size(); ++i) {
                const std::string at = join(where, "components") + "[" + std::to_string(i) + "]";
                parsed.push_back(parse_at(as_string(comps[i], at), at));
            }
            return PathCurve::expression(space, std::move(parsed), lo, hi);
        }
        if (kind == "polyline") {
            const json& verts = require(p, "vertices", where);
            if (!verts.is_array()) fail(ErrorKind::Config, "expected an array of points", join(where, "vertices"));
            std::vector<Point> vs;
            for (std::size_t i = 0; i < verts.size(); ++i) {
                vs.push_back(as_point(verts[i], space, join(where, "vertices") + "[" + std::to_string(i) + "]"));
            }
            return PathCurve::polyline(space, std::move(vs), lo, hi);
        }
        if (kind == "circle") {
            Point center(space.dim(), 0.0);
            if (p.contains("center")) center = as_point(p.at("center"), space, join(where, "center"));
            const double r = p.contains("radius") ? as_number(p.at("radius"), join(where, "radius")) : 1.0;
            std::size_t a = std::min<std::size_t>(1, space.dim() - 1);
            std::size_t b = std::min<std::size_t>(2, space.dim() - 1);
            if (p.contains("plane")) {
                const json& pl = p.at("plane");
                if (!pl.is_array() || pl.size() != 2) fail(ErrorKind::Config, "plane must name two axes", join(where, "plane"));
                a = axis_index(pl[0], space, join(where, "plane") + "[0]");
                b = axis_index(pl[1], space, join(where, "plane") + "[1]");
            }
            if (a == b) fail(ErrorKind::Config, "circle plane needs two distinct axes", join(where, "plane"));
            const Expression angle = Expression::number(2.0) * Expression::pi() *
                                     (Expression::variable(PathCurve::kParameter) - Expression::number(lo)) /
                                     Expression::number(hi - lo);
            std::vector<Expression> comps;
            for (std::size_t mu = 0; mu < space.dim(); ++mu) {
                Expression c = Expression::number(center[mu]);
                if (mu == a) c = c + Expression::number(r) * cos(angle);
                if (mu == b) c = c + Expression::number(r) * sin(angle);
                comps.push_back(c);
            }
            return PathCurve::expression(space, comps, lo, hi);
        }
    } catch (const Error& e) {
        if (!e.location().empty() && e.location().rfind(where, 0) == 0) throw;
        fail(e.kind(), e.what(), where);
    }
    fail(ErrorKind::Config, "unknown path kind '" + kind + "' (expression, polyline, circle)", join(where, "kind"));
}

RegionSpec parse_region(const json& cfg, const ChartedSpace& space) {
    const json& r = require(cfg, "region", "");
    const json& box = require(r, "box", "region");
    if (!box.is_array() || box.size() != space.dim()) {
        fail(ErrorKind::Config, "region.box needs one [lo, hi] per coordinate", "region.box");
    }
    std::vector<Interval> intervals;
    for (std::size_t a = 0; a < box.size(); ++a) {
        const auto iv = as_numbers(box[a], "region.box[" + std::to_string(a) + "]");
        if (iv.size() != 2) fail(ErrorKind::Config, "interval must be [lo, hi]", "region.box[" + std::to_string(a) + "]");
        intervals.push_back({iv[0], iv[1]});
    }
    std::vector<std::size_t> samples(space.dim(), kDefaultSamplesPerAxis);
    if (r.contains("samples")) {
        const json& s = r.at("samples");
        if (s.is_array()) {
            if (s.size() != space.dim()) fail(ErrorKind::Config, "one sample count per coordinate", "region.samples");
            for (std::size_t a = 0; a < s.size(); ++a) samples[a] = as_count(s[a], "region.samples[" + std::to_string(a) + "]");
        } else {
            samples.assign(space.dim(), as_count(s, "region.samples"));
        }
    }
    std::map<std::size_t, double> frozen;
    if (r.contains("frozen")) {
        const json& fr = r.at("frozen");
        if (!fr.is_object()) fail(ErrorKind::Config, "expected an object of coordinate values", "region.frozen");
        for (const auto& [name, value] : fr.items()) {
            frozen[axis_index(json(name), space, "region.frozen." + name)] = as_number(value, "region.frozen." + name);
        }
    }
    return frozen.empty() ? RegionSpec::box(std::move(intervals), std::move(samples))
                          : RegionSpec::slice(std::move(intervals), std::move(samples), std::move(frozen));
}

struct Numeric {
    std::size_t steps = 200;
    Scheme scheme = Scheme::Rk4;
    std::string scheme_name = "rk4";
    double tol = kDefaultFlatnessTol;
    std::size_t quad_nodes = 401;

    json to_json() const {
        return {{"steps", steps}, {"scheme", scheme_name}, {"tol", tol}, {"quad_nodes", quad_nodes}};
    }
};

Numeric parse_numeric(const json& cfg) {
    Numeric n;
    if (!cfg.contains("numeric")) return n;
    const json& j = cfg.at("numeric");
    if (!j.is_object()) fail(ErrorKind::Config, "expected an object", "numeric");
    if (j.contains("steps")) {
        n.steps = as_count(j.at("steps"), "numeric.steps");
        if (n.steps < 1) fail(ErrorKind::Config, "steps must be at least 1", "numeric.steps");
    }
    if (j.contains("scheme")) {
        n.scheme_name = as_string(j.at("scheme"), "numeric.scheme");
        if (n.scheme_name == "rk4") {
            n.scheme = Scheme::Rk4;
        } else if (n.scheme_name == "magnus2") {
            n.scheme = Scheme::Magnus2;
        } else {
            fail(ErrorKind::Config, "scheme must be 'rk4' or 'magnus2'", "numeric.scheme");
        }
    }
    if (j.contains("tol")) {
        n.tol = as_number(j.at("tol"), "numeric.tol");
        if (!(n.tol > 0.0)) fail(ErrorKind::Config, "tol must be positive", "numeric.tol");
    }
    if (j.contains("quad_nodes")) {
        n.quad_nodes = as_count(j.at("quad_nodes"), "numeric.quad_nodes");
        if (n.quad_nodes < 3 || n.quad_nodes % 2 == 0) {
            fail(ErrorKind::Config, "quad_nodes must be odd and at least 3", "numeric.quad_nodes");
        }
    }
    return n;
}

Coupling parse_coupling(const json& cfg) {
    if (!cfg.contains("coupling")) return {};
    const json& c = cfg.at("coupling");
    const std::string kind = as_string(require(c, "kind", "coupling"), "coupling.kind");
    if (kind == "real") return Coupling::real();
    if (kind == "u1") return Coupling::u1(c.contains("charge") ? as_number(c.at("charge"), "coupling.charge") : 1.0);
    fail(ErrorKind::Config, "coupling kind must be 'real' or 'u1'", "coupling.kind");
}

std::vector<Point> parse_points(const json& cfg, const ChartedSpace& space) {
    std::vector<Point> pts;
    if (cfg.contains("points")) {
        const json& p = cfg.at("points");
        if (!p.is_array() || p.empty()) fail(ErrorKind::Config, "expected a non-empty array of points", "points");
        for (std::size_t i = 0; i < p.size(); ++i) pts.push_back(as_point(p[i], space, "points[" + std::to_string(i) + "]"));
        return pts;
    }
    if (cfg.contains("region")) {
        const Lattice lattice(parse_region(cfg, space));
        for (std::size_t i = 0; i < lattice.size(); ++i) pts.push_back(lattice.point(i));
        return pts;
    }
    fail(ErrorKind::Config, "scenario needs 'points' or 'region'", "points");
}

CoefficientField coupled(const CoefficientField& field, const Coupling& c) {
    if (c.kind == CouplingKind::Real) return field;
    return Potential(field).transport_field(c);
}

json flatness_json(const FlatnessReport& r) {
    return {{"flat", r.flat},
            {"max_violation", r.max_violation},
            {"argmax_point", point_json(r.argmax_point)},
            {"argmax_component", json::array({r.argmax_component.first, r.argmax_component.second})},
            {"lattice_points", r.lattice_points},
            {"tol", r.tol}};
}

// ---------------------------------------------------------------------------
// scenarios

struct Context {
    const json& cfg;
    ChartedSpace space;
    Numeric numeric;
    std::string csv;
};

json run_transport(Context& ctx) {
    const CoefficientField field = parse_field(ctx.cfg, ctx.space);
    const PathCurve path = parse_path(require(ctx.cfg, "path", ""), ctx.space, "path");
    const double s = ctx.cfg.contains("s") ? as_number(ctx.cfg.at("s"), "s") : path.s_min();
    const double t = ctx.cfg.contains("t") ? as_number(ctx.cfg.at("t"), "t") : path.s_max();
    const TransportResult r = integrate_transport(field, path, s, t, TransportOptions{ctx.numeric.steps, ctx.numeric.scheme});
    json out{{"matrix", matrix_json(r.matrix)}, {"est_error", r.est_error}, {"s", s}, {"t", t}, {"path_id", r.path_id}};
    if (field.fibre_dim() == 1) out["value"] = cplx(r.matrix(0, 0));
    return out;
}

json run_curvature(Context& ctx) {
    const CoefficientField field = parse_field(ctx.cfg, ctx.space);
    const CurvatureEvaluator eval(field);
    json samples = json::array();
    for (const Point& p : parse_points(ctx.cfg, ctx.space)) {
        const CurvatureAtPoint c = eval.at(p);
        json comps = json::object();
        for (std::size_t mu = 0; mu < c.dim; ++mu) {
            for (std::size_t nu = mu + 1; nu < c.dim; ++nu) {
                comps["R_" + std::to_string(mu) + std::to_string(nu)] = matrix_json(c.at(mu, nu));
            }
        }
        samples.push_back({{"point", point_json(p)}, {"components", comps}});
    }
    return {{"samples", samples}};
}

json run_flatness(Context& ctx, bool slice) {
    const CoefficientField field = parse_field(ctx.cfg, ctx.space);
    const RegionSpec region = parse_region(ctx.cfg, ctx.space);
    if (slice != region.is_slice()) {
        fail(ErrorKind::Config, slice ? "slice_flatness needs region.frozen" : "flatness needs a box without frozen coordinates",
             "region");
    }
    const FlatnessReport r = slice ? is_flat_on_slice(field, region, ctx.numeric.tol) : is_flat(field, region, ctx.numeric.tol);
    json out = flatness_json(r);
    out["gate"] = r.flat ? "pass" : "fail";
    return out;
}

json run_holonomy(Context& ctx) {
    const Coupling c = parse_coupling(ctx.cfg);
    const CoefficientField field = coupled(parse_field(ctx.cfg, ctx.space), c);
    const PathCurve loop = parse_path(require(ctx.cfg, "loop", ""), ctx.space, "loop");
    const ScalarTransport h = holonomy(field, loop, QuadratureOptions{ctx.numeric.quad_nodes});
    return {{"value", cplx(h.value)}, {"loop_integral", cplx(h.exponent)}, {"est_error", h.est_error},
            {"path_id", loop.id()}};
}

json normal_json(const NormalFrameResult& r) {
    json samples = json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        samples.push_back({{"point", point_json(r.points[i])}, {"f0", cplx(r.f0[i])}, {"gauge", cplx(r.gauge[i])}});
    }
    return {{"residual", r.residual},
            {"transformed_max", r.transformed_max},
            {"path_independence_defect", r.path_independence_defect},
            {"flatness", flatness_json(r.flatness)},
            {"gate", "pass"},
            {"samples", samples}};
}

Point parse_basepoint(const Context& ctx, const RegionSpec& region) {
    if (ctx.cfg.contains("basepoint")) return as_point(ctx.cfg.at("basepoint"), ctx.space, "basepoint");
    Point b(region.dim());
    for (std::size_t a = 0; a < region.dim(); ++a) b[a] = 0.5 * (region.intervals()[a].lo + region.intervals()[a].hi);
    return b;
}

json run_normal_frame(Context& ctx) {
    const CoefficientField field = parse_field(ctx.cfg, ctx.space);
    const RegionSpec region = parse_region(ctx.cfg, ctx.space);
    NormalFrameOptions opts;
    opts.quad_nodes = ctx.numeric.quad_nodes;
    return normal_json(solve_normal_frame(field, region, parse_basepoint(ctx, region), ctx.numeric.tol, opts));
}

json run_inertial_frame(Context& ctx) {
    const Potential a(parse_field(ctx.cfg, ctx.space));
    const RegionSpec region = parse_region(ctx.cfg, ctx.space);
    NormalFrameOptions opts;
    opts.quad_nodes = ctx.numeric.quad_nodes;
    cd scale(1.0, 0.0);
    if (ctx.cfg.contains("scale")) {
        const auto v = as_numbers(ctx.cfg.at("scale"), "scale");
        if (v.size() != 2) fail(ErrorKind::Config, "scale must be [re, im]", "scale");
        scale = cd(v[0], v[1]);
    }
    const InertialFrameResult r = solve_inertial_frame(a, region, parse_basepoint(ctx, region), ctx.numeric.tol, opts, scale);
    json out = normal_json(r.normal);
    for (std::size_t i = 0; i < r.lambda.size(); ++i) {
        out["samples"][i]["lambda"] = cplx(r.lambda[i]);
        out["samples"][i]["gauge"] = cplx(r.gauge[i]);
    }
    out["scale"] = cplx(r.scale);
    return out;
}

json run_gauge_check(Context& ctx) {
    const Potential a(parse_field(ctx.cfg, ctx.space));
    const GaugeCondition c = parse_gauge_condition(as_string(require(ctx.cfg, "condition", ""), "condition"));
    std::optional<ScalarFieldFn> lambda;
    std::optional<ScalarFieldFn> phi;
    if (ctx.cfg.contains("lambda")) lambda.emplace(ctx.space, parse_at(as_string(ctx.cfg.at("lambda"), "lambda"), "lambda"));
    if (ctx.cfg.contains("phi")) {
        if (!lambda) fail(ErrorKind::Config, "phi residuals need a lambda", "phi");
        phi.emplace(ctx.space, parse_at(as_string(ctx.cfg.at("phi"), "phi"), "phi"));
    }
    json samples = json::array();
    double worst = 0.0;
    for (const Point& p : parse_points(ctx.cfg, ctx.space)) {
        const cd r = gauge_residual(a, c, p);
        worst = std::max(worst, std::abs(r));
        json s{{"point", point_json(p)}, {"residual", cplx(r)}};
        if (lambda) s["lambda_residual"] = cplx(lambda_condition_residual(*lambda, c, p));
        if (phi) s["phi_residual"] = cplx(phi_condition_residual(*phi, *lambda, c, p));
        samples.push_back(s);
    }
    return {{"condition", to_string(c)}, {"max_residual", worst}, {"holds", worst <= ctx.numeric.tol}, {"samples", samples}};
}

json run_ab_sweep(Context& ctx) {
    const Coupling c = parse_coupling(ctx.cfg);
    const json& sweep = require(ctx.cfg, "sweep", "");
    const std::string param = as_string(require(sweep, "param", "sweep"), "sweep.param");
    const std::vector<double> values = as_numbers(require(sweep, "values", "sweep"), "sweep.values");
    if (values.empty()) fail(ErrorKind::Config, "sweep needs at least one value", "sweep.values");
    const QuadratureOptions q{ctx.numeric.quad_nodes};

    json rows = json::array();
    ctx.csv = "param,re,im,est_error\n";
    for (double v : values) {
        ScalarTransport h;
        if (param == "radius") {
            json loop = ctx.cfg.contains("loop") ? ctx.cfg.at("loop") : json{{"kind", "circle"}};
            if (loop.value("kind", std::string("circle")) != "circle") {
                fail(ErrorKind::Config, "a radius sweep needs a circle loop", "loop.kind");
            }
            loop["radius"] = v;
            const CoefficientField field = coupled(parse_field(ctx.cfg, ctx.space), c);
            h = holonomy(field, parse_path(loop, ctx.space, "loop"), q);
        } else {
            const Params over{{param, v}};
            const CoefficientField field = coupled(parse_field(ctx.cfg, ctx.space, &over), c);
            h = holonomy(field, parse_path(require(ctx.cfg, "loop", ""), ctx.space, "loop"), q);
        }
        rows.push_back({{"param", v}, {"value", cplx(h.value)}, {"est_error", h.est_error}});
        ctx.csv += fmt17(v) + "," + fmt17(h.value.real()) + "," + fmt17(h.value.imag()) + "," + fmt17(h.est_error) + "\n";
    }
    return {{"param", param}, {"rows", rows}};
}

json run_stokes(Context& ctx) {
    const Potential a(parse_field(ctx.cfg, ctx.space));
    const PathCurve loop = parse_path(require(ctx.cfg, "loop", ""), ctx.space, "loop");
    StokesOptions opts;
    opts.quad.nodes = ctx.numeric.quad_nodes;
    if (ctx.cfg.contains("surface_nodes")) opts.surface_nodes = as_count(ctx.cfg.at("surface_nodes"), "surface_nodes");
    const StokesResult r = stokes_check(a, loop, opts);
    return {{"loop_integral", cplx(r.loop_integral)},
            {"flux_integral", cplx(r.flux_integral)},
            {"defect", r.defect},
            {"plane", json::array({r.axis_a, r.axis_b})}};
}

using Runner = std::function<json(Context&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table{
        {"transport", run_transport},
        {"curvature", run_curvature},
        {"flatness", [](Context& c) { return run_flatness(c, false); }},
        {"slice_flatness", [](Context& c) { return run_flatness(c, true); }},
        {"holonomy", run_holonomy},
        {"normal_frame", run_normal_frame},
        {"inertial_frame", run_inertial_frame},
        {"gauge_check", run_gauge_check},
        {"ab_sweep", run_ab_sweep},
        {"stokes", run_stokes},
    };
    return table;
}

void dump_into(const json& j, std::string& out, int level) {
    const std::string pad(static_cast<std::size_t>(2 * level + 2), ' ');
    const std::string close(static_cast<std::size_t>(2 * level), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                out += first ? "" : ",\n";
                first = false;
                out += pad + json(key).dump() + ": ";
                dump_into(value, out, level + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case json::value_t::array: {
            bool flat = true;
            for (const auto& v : j) flat = flat && !v.is_structured();
            if (flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    out += i ? ", " : "";
                    dump_into(j[i], out, level + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                out += (i ? ",\n" : "") + pad;
                dump_into(j[i], out, level + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? fmt17(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Syntax:
        case ErrorKind::Domain:
            return 2;
        case ErrorKind::Gate:
            return 3;
        case ErrorKind::Singularity:
        case ErrorKind::Numerical:
        case ErrorKind::Evaluation:
            return 4;
    }
    return 4;
}

RunOutcome run_scenario(const json& config) {
    auto error_outcome = [](ErrorKind kind, const std::string& message, const std::string& location) {
        RunOutcome out;
        out.report = {{"error", {{"kind", to_string(kind)}, {"message", message}, {"location", location}}}};
        out.exit_code = exit_code_for(kind);
        return out;
    };
    try {
        if (!config.is_object()) fail(ErrorKind::Config, "configuration must be a JSON object");
        const std::string scenario = as_string(require(config, "scenario", ""), "scenario");
        const auto it = runners().find(scenario);
        if (it == runners().end()) fail(ErrorKind::Config, "unknown scenario '" + scenario + "'", "scenario");
        Context ctx{config, parse_chart(config), parse_numeric(config), {}};
        json result = it->second(ctx);
        RunOutcome out;
        out.report = {{"scenario", scenario}, {"config", config}, {"numeric", ctx.numeric.to_json()}, {"result", result}};
        out.csv = std::move(ctx.csv);
        return out;
    } catch (const Error& e) {
        return error_outcome(e.kind(), e.what(), e.location());
    } catch (const json::exception& e) {
        return error_outcome(ErrorKind::Config, e.what(), "");
    } catch (const std::exception& e) {
        return error_outcome(ErrorKind::Evaluation, e.what(), "");
    }
}

std::string dump_report(const json& report) {
    std::string out;
    dump_into(report, out, 0);
    out += "\n";
    return out;
}

std::string catalog_listing() {
    std::string out;
    for (const auto& e : catalog_entries()) {
        std::string params;
        for (std::size_t i = 0; i < e.params.size(); ++i) params += (i ? ", " : "") + e.params[i];
        out += e.name + "(" + params + "): " + e.description + "\n";
    }
    return out;
}

}  // namespace pathtrans
