#include "pathtrans/em.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pathtrans/error.hpp"

namespace pathtrans {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string point_string(const Point& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) out += (i ? ", " : "") + fmt(p[i]);
    return out + ")";
}

cd eval_at(const Expression& e, const ChartedSpace& space, const Point& p) {
    space.check_point(p);
    std::map<std::string, cd> bindings;
    for (std::size_t mu = 0; mu < space.dim(); ++mu) bindings[space.names()[mu]] = cd(p[mu], 0.0);
    return eval(e, bindings);
}

void require_chart(const ChartedSpace& space, const ChartedSpace& other, const char* what) {
    if (!(space == other)) fail(ErrorKind::Config, std::string(what) + " lives on a different chart than the potential");
}

// Sum over the listed coordinates of g^mu mu d_mu d_mu f.
cd wave_operator(const ScalarFieldFn& f, const Point& p, std::size_t first, std::size_t last) {
    const ChartedSpace& space = f.space();
    cd sum(0.0, 0.0);
    for (std::size_t mu = first; mu <= last; ++mu) {
        sum += space.inverse_metric_diag()[mu] * eval_at(differentiate(f.partial(mu), space.names()[mu]), space, p);
    }
    return sum;
}

void require_four(const ChartedSpace& space) {
    if (space.dim() != 4) fail(ErrorKind::Config, "gauge conditions need a 4-dimensional chart");
}

}  // namespace

Potential::Potential(CoefficientField a, Coupling coupling) : a_(std::move(a)), coupling_(coupling) {
    if (a_.fibre_dim() != 1) fail(ErrorKind::Config, "a potential is a k = 1 coefficient field");
    if (a_.dim() != 4) fail(ErrorKind::Config, "a potential lives on a 4-dimensional chart");
    if (coupling_.kind == CouplingKind::U1 && !std::isfinite(coupling_.charge)) {
        fail(ErrorKind::Config, "coupling charge must be finite");
    }
}

CoefficientField Potential::transport_field(const Coupling& c) const {
    if (c.kind == CouplingKind::Real) return a_;
    const Expression factor = Expression::number(cd(0.0, c.charge));
    std::vector<std::vector<Expression>> comps;
    for (std::size_t mu = 0; mu < a_.dim(); ++mu) comps.push_back({factor * component(mu)});
    return CoefficientField(a_.space(), 1, std::move(comps), a_.guard(), a_.label() + " (u1)");
}

FieldTensorAtPoint field_tensor(const Potential& a, const Point& p) {
    const CoefficientField& field = a.field();
    field.space().check_point(p);
    field.check_regular(p);
    const std::size_t n = field.dim();
    const FieldJacobian jac(field);
    std::vector<cd> d(n * n);
    jac.evaluate_into(p, d);
    FieldTensorAtPoint out{p, n, std::vector<cd>(n * n, cd(0.0, 0.0))};
    for (std::size_t mu = 0; mu < n; ++mu) {
        for (std::size_t nu = mu + 1; nu < n; ++nu) {
            const cd f = -d[mu * n + nu] + d[nu * n + mu];
            out.components[mu * n + nu] = f;
            out.components[nu * n + mu] = -f;
        }
    }
    return out;
}

Potential gauge_transform(const Potential& a, const ScalarFieldFn& lambda, const std::optional<std::vector<Expression>>& b) {
    require_chart(a.space(), lambda.space(), "gauge function");
    const std::size_t n = a.space().dim();
    std::vector<Expression> shifted;
    for (std::size_t nu = 0; nu < n; ++nu) shifted.push_back(a.component(nu) + lambda.partial(nu));

    std::vector<std::vector<Expression>> comps(n);
    if (!b) {
        for (std::size_t mu = 0; mu < n; ++mu) comps[mu] = {shifted[mu]};
    } else {
        if (b->size() != n * n) fail(ErrorKind::Config, "base change B must have dim*dim entries");
        Mat probe(n, n);
        bool constant = true;
        for (std::size_t i = 0; i < n * n; ++i) {
            constant = constant && (*b)[i].free_variables().empty();
            if (constant) probe(i / n, i % n) = eval((*b)[i], {});
        }
        if (constant) checked_inverse(probe, "base change B");
        for (std::size_t mu = 0; mu < n; ++mu) {
            Expression sum;
            for (std::size_t nu = 0; nu < n; ++nu) sum = sum + (*b)[mu * n + nu] * shifted[nu];
            comps[mu] = {sum};
        }
    }
    return Potential(CoefficientField(a.space(), 1, std::move(comps), a.field().guard(), a.field().label() + "'"),
                     a.coupling());
}

GaugeCondition parse_gauge_condition(const std::string& name) {
    if (name == "lorenz") return GaugeCondition::Lorenz;
    if (name == "coulomb") return GaugeCondition::Coulomb;
    if (name == "hamilton") return GaugeCondition::Hamilton;
    if (name == "axial") return GaugeCondition::Axial;
    fail(ErrorKind::Config, "unknown gauge condition '" + name + "' (lorenz, coulomb, hamilton, axial)", "condition");
}

const char* to_string(GaugeCondition c) {
    switch (c) {
        case GaugeCondition::Lorenz: return "lorenz";
        case GaugeCondition::Coulomb: return "coulomb";
        case GaugeCondition::Hamilton: return "hamilton";
        case GaugeCondition::Axial: return "axial";
    }
    return "?";
}

cd gauge_residual(const Potential& a, GaugeCondition c, const Point& p) {
    const ChartedSpace& space = a.space();
    require_four(space);
    a.field().check_regular(p);
    auto divergence = [&](std::size_t first) {
        cd sum(0.0, 0.0);
        for (std::size_t mu = first; mu < 4; ++mu) {
            sum += space.inverse_metric_diag()[mu] * eval_at(differentiate(a.component(mu), space.names()[mu]), space, p);
        }
        return sum;
    };
    switch (c) {
        case GaugeCondition::Lorenz: return divergence(0);
        case GaugeCondition::Coulomb: return divergence(1);
        case GaugeCondition::Hamilton: return eval_at(a.component(0), space, p);
        case GaugeCondition::Axial: return eval_at(a.component(3), space, p);
    }
    return {};
}

cd lambda_condition_residual(const ScalarFieldFn& lambda, GaugeCondition c, const Point& p) {
    require_four(lambda.space());
    switch (c) {
        case GaugeCondition::Lorenz: return wave_operator(lambda, p, 0, 3);
        case GaugeCondition::Coulomb: return wave_operator(lambda, p, 1, 3);
        case GaugeCondition::Hamilton: return lambda.partial_at(0, p);
        case GaugeCondition::Axial: return lambda.partial_at(3, p);
    }
    return {};
}

cd phi_condition_residual(const ScalarFieldFn& phi, const ScalarFieldFn& lambda, GaugeCondition c, const Point& p) {
    require_four(phi.space());
    if (!(phi.space() == lambda.space())) fail(ErrorKind::Config, "phi and lambda live on different charts");
    switch (c) {
        case GaugeCondition::Lorenz: return wave_operator(phi, p, 0, 3) + wave_operator(lambda, p, 0, 3);
        case GaugeCondition::Coulomb: return wave_operator(phi, p, 1, 3) + wave_operator(lambda, p, 1, 3);
        case GaugeCondition::Hamilton: return phi.partial_at(0, p);
        case GaugeCondition::Axial: return phi.partial_at(3, p);
    }
    return {};
}

InertialFrameResult solve_inertial_frame(const Potential& a, const RegionSpec& region, const Point& basepoint,
                                         double tol, const NormalFrameOptions& opts, cd scale) {
    if (scale == cd(0.0, 0.0)) fail(ErrorKind::Config, "strong normal scale b must be nonzero", "scale");
    if (region.is_slice()) fail(ErrorKind::Config, "inertial frame solver needs a box region");
    const FlatnessReport flat = is_flat(a.field(), region, tol, opts.exec);
    if (!flat.flat) {
        const auto [mu, nu] = flat.argmax_component;
        const cd f = field_tensor(a, flat.argmax_point).at(mu, nu);
        fail(ErrorKind::Gate,
             "no inertial frame: field strength F_" + std::to_string(mu) + std::to_string(nu) + " = " + fmt(f.real()) +
                 (f.imag() != 0.0 ? " + " + fmt(f.imag()) + "i" : "") + " exceeds tol " + fmt(tol) + " at " +
                 point_string(flat.argmax_point),
             point_string(flat.argmax_point));
    }
    InertialFrameResult out;
    out.normal = solve_normal_frame(a.field(), region, basepoint, tol, opts);
    out.scale = scale;
    for (const cd& f0 : out.normal.f0) {
        out.lambda.push_back(-f0);
        out.gauge.push_back(scale * std::exp(-f0));
    }
    return out;
}

ScalarTransport ab_phase(const Potential& a, const PathCurve& loop, const Coupling& coupling,
                         const QuadratureOptions& opts) {
    return holonomy(a.transport_field(coupling), loop, opts);
}

// ---------------------------------------------------------------------------

namespace {

struct SNode {
    double s;
    double weight;
    std::size_t piece;
};

// Composite Simpson nodes in s, split at the loop's breakpoints.
std::vector<SNode> loop_nodes(const PathCurve& loop, std::size_t nodes) {
    const auto bps = loop.breakpoints();
    const double length = loop.s_max() - loop.s_min();
    const auto total = static_cast<double>(nodes - 1);
    std::vector<SNode> out;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const double a = bps[i];
        const double b = bps[i + 1];
        if (!(b > a)) continue;
        auto m = static_cast<std::size_t>(std::llround(total * (b - a) / length));
        m = std::max<std::size_t>(2, m + m % 2);
        const double h = (b - a) / static_cast<double>(m);
        const std::size_t piece = loop.piece_between(a, b);
        for (std::size_t j = 0; j <= m; ++j) {
            const double w = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            out.push_back({j == m ? b : a + static_cast<double>(j) * h, w * h / 3.0, piece});
        }
    }
    return out;
}

}  // namespace

StokesResult stokes_check(const Potential& a, const PathCurve& loop, const StokesOptions& opts) {
    require_chart(a.space(), loop.space(), "loop");
    if (opts.surface_nodes < 3 || opts.surface_nodes % 2 == 0) {
        fail(ErrorKind::Config, "surface_nodes must be odd and at least 3");
    }
    const std::size_t n = a.space().dim();
    const Point origin = loop.eval(loop.s_min());

    // the two coordinates that vary along the loop
    std::vector<double> samples = loop.breakpoints();
    for (std::size_t j = 0; j <= 256; ++j) {
        samples.push_back(loop.s_min() + (loop.s_max() - loop.s_min()) * static_cast<double>(j) / 256.0);
    }
    std::vector<bool> varies(n, false);
    for (double s : samples) {
        const Point x = loop.eval(s);
        for (std::size_t mu = 0; mu < n; ++mu) {
            if (std::abs(x[mu] - origin[mu]) > 1e-12 * std::max(1.0, std::abs(origin[mu]))) varies[mu] = true;
        }
    }
    std::vector<std::size_t> axes;
    for (std::size_t mu = 0; mu < n; ++mu) {
        if (varies[mu]) axes.push_back(mu);
    }
    if (axes.size() != 2) fail(ErrorKind::Config, "Stokes check needs a loop lying in a coordinate 2-plane", "loop");
    const std::size_t ua = axes[0];
    const std::size_t ub = axes[1];

    StokesResult out;
    out.axis_a = ua;
    out.axis_b = ub;
    out.loop_integral = holonomy(a.field(), loop, opts.quad).exponent;

    const std::vector<SNode> snodes = loop_nodes(loop, opts.surface_nodes);
    std::vector<Point> pts;
    std::vector<double> cross;
    double cu = 0.0;
    double cv = 0.0;
    {
        const std::size_t m = 256;
        for (std::size_t j = 0; j < m; ++j) {
            const Point x = loop.eval(loop.s_min() + (loop.s_max() - loop.s_min()) * static_cast<double>(j) / m);
            cu += x[ua];
            cv += x[ub];
        }
        cu /= static_cast<double>(m);
        cv /= static_cast<double>(m);
    }

    // orientation and star shape about the centroid
    double scale = 0.0;
    for (const auto& node : snodes) {
        const Point x = loop.eval(node.s);
        const Vector v = loop.tangent_on_piece(node.s, node.piece);
        const double c = (x[ua] - cu) * v[ub] - (x[ub] - cv) * v[ua];
        pts.push_back(x);
        cross.push_back(c);
        scale = std::max(scale, std::abs(c));
    }
    const bool positive = cross.front() > 0.0;
    for (double c : cross) {
        if (!(std::abs(c) > 1e-12 * scale) || (c > 0.0) != positive) {
            fail(ErrorKind::Config, "Stokes check needs a loop that is star-shaped about its centroid", "loop");
        }
    }

    // a guarded axis piercing this plane inside the loop makes the flux meaningless
    if (const auto& guard = a.field().guard()) {
        const bool same_plane = (guard->a == ua && guard->b == ub) || (guard->a == ub && guard->b == ua);
        if (same_plane) {
            double turn = 0.0;
            for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
                const double t0 = std::atan2(pts[j][ub], pts[j][ua]);
                const double t1 = std::atan2(pts[j + 1][ub], pts[j + 1][ua]);
                double d = t1 - t0;
                if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
                if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
                turn += d;
            }
            if (std::abs(turn) > std::numbers::pi) {
                fail(ErrorKind::Singularity,
                     "Stokes theorem does not apply: the potential is singular inside the loop (axis x" +
                         std::to_string(guard->a) + " = x" + std::to_string(guard->b) + " = 0 is enclosed)",
                     "loop");
            }
        }
    }

    const FieldJacobian jac(a.field());
    const std::size_t mr = opts.surface_nodes - 1;
    const double hr = 1.0 / static_cast<double>(mr);
    std::vector<cd> d(n * n);
    cd flux(0.0, 0.0);
    try {
        for (std::size_t j = 0; j < snodes.size(); ++j) {
            cd inner(0.0, 0.0);
            Point y = origin;
            for (std::size_t i = 1; i <= mr; ++i) {
                const double r = static_cast<double>(i) * hr;
                const double w = (i == mr) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
                y[ua] = cu + r * (pts[j][ua] - cu);
                y[ub] = cv + r * (pts[j][ub] - cv);
                a.field().check_regular(y);
                jac.evaluate_into(y, d);
                inner += w * r * (-d[ua * n + ub] + d[ub * n + ua]);
            }
            flux += snodes[j].weight * cross[j] * inner * (hr / 3.0);
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Singularity) throw;
        fail(ErrorKind::Singularity, std::string("Stokes theorem does not apply: ") + e.what(), e.location());
    }
    if (!std::isfinite(flux.real()) || !std::isfinite(flux.imag())) {
        fail(ErrorKind::Singularity, "Stokes theorem does not apply: field strength is not finite inside the loop");
    }
    out.flux_integral = flux;
    out.defect = std::abs(out.loop_integral - out.flux_integral);
    return out;
}

}  // namespace pathtrans
