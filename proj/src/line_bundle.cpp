#include "pathtrans/line_bundle.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

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

cd scalar_at(const Generator& g, double s, std::size_t piece) { return g.on_piece(s, piece)(0, 0); }

// Composite Simpson over [a, b] with m (even) intervals.
cd simpson(const Generator& g, double a, double b, std::size_t piece, std::size_t m) {
    const double h = (b - a) / static_cast<double>(m);
    cd sum = scalar_at(g, a, piece) + scalar_at(g, b, piece);
    for (std::size_t j = 1; j < m; ++j) {
        sum += (j % 2 == 1 ? 4.0 : 2.0) * scalar_at(g, a + static_cast<double>(j) * h, piece);
    }
    return sum * (h / 3.0);
}

std::size_t intervals_for(std::size_t nodes) {
    if (nodes < 3) fail(ErrorKind::Config, "quadrature needs at least 3 nodes");
    return nodes - 1;
}

}  // namespace

ScalarTransport scalar_transport(const Generator& gamma, double s, double t, const QuadratureOptions& opts) {
    if (gamma.fibre_dim() != 1) fail(ErrorKind::Config, "scalar transport needs a line bundle (k = 1)");
    const std::size_t total_intervals = intervals_for(opts.nodes);
    if (s == t) return ScalarTransport{cd(1.0, 0.0), cd(0.0, 0.0), 0.0};

    // split at interior breakpoints in the direction of travel
    std::vector<double> cuts{s};
    std::vector<double> inner;
    for (double b : gamma.breakpoints()) {
        if (b > std::min(s, t) && b < std::max(s, t)) inner.push_back(b);
    }
    if (t < s) std::reverse(inner.begin(), inner.end());
    cuts.insert(cuts.end(), inner.begin(), inner.end());
    cuts.push_back(t);

    const double length = std::abs(t - s);
    cd integral(0.0, 0.0);
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const std::size_t piece = gamma.piece_between(a, b);
        // multiple of 4 so the half-resolution pass is still a Simpson rule
        auto m = static_cast<std::size_t>(std::llround(static_cast<double>(total_intervals) * std::abs(b - a) / length));
        m = std::max<std::size_t>(4, (m + 3) / 4 * 4);
        const cd fine = simpson(gamma, a, b, piece, m);
        const cd coarse = simpson(gamma, a, b, piece, m / 2);
        integral += fine;
        err += std::abs(fine - coarse) / 15.0;
    }
    if (!std::isfinite(integral.real()) || !std::isfinite(integral.imag())) {
        fail(ErrorKind::Numerical, "line integral is not finite");
    }
    const cd value = std::exp(-integral);
    const double roundoff = 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(integral));
    return ScalarTransport{value, integral, std::abs(value) * (err + roundoff)};
}

ScalarTransport scalar_transport(const CoefficientField& field, const PathCurve& path, double s, double t,
                                 const QuadratureOptions& opts) {
    if (!path.contains(s) || !path.contains(t)) fail(ErrorKind::Domain, "transport endpoints outside the path domain");
    return scalar_transport(Generator::along(field, path), s, t, opts);
}

ScalarTransport holonomy(const CoefficientField& field, const PathCurve& loop, const QuadratureOptions& opts) {
    const Point start = loop.eval(loop.s_min());
    const Point end = loop.eval(loop.s_max());
    double gap2 = 0.0;
    for (std::size_t i = 0; i < start.size(); ++i) gap2 += (start[i] - end[i]) * (start[i] - end[i]);
    if (std::sqrt(gap2) > kLoopClosureTol) {
        fail(ErrorKind::Config, "loop is not closed: endpoints differ by " + fmt(std::sqrt(gap2)), "loop");
    }
    return scalar_transport(field, loop, loop.s_min(), loop.s_max(), opts);
}

// ---------------------------------------------------------------------------

ScalarGauge::ScalarGauge(PathFrameChange a) : path_form_(std::move(a)) {
    if (path_form_->fibre_dim() != 1) fail(ErrorKind::Config, "scalar gauge needs a 1x1 frame change");
}

ScalarGauge::ScalarGauge(const ScalarFieldFn& a, const PathCurve& path) : field_form_(a), path_(path) {
    if (!(a.space() == path.space())) fail(ErrorKind::Config, "gauge function and path live on different charts");
}

cd ScalarGauge::value(double s) const {
    if (path_form_) return path_form_->value(s)(0, 0);
    return (*field_form_)(path_->eval(s));
}

cd ScalarGauge::derivative(double s) const {
    if (path_form_) return path_form_->derivative(s)(0, 0);
    const Point x = path_->eval(s);
    const Vector v = path_->tangent(s);
    cd out(0.0, 0.0);
    for (std::size_t mu = 0; mu < v.size(); ++mu) {
        if (v[mu] != 0.0) out += field_form_->partial_at(mu, x) * v[mu];
    }
    return out;
}

Generator ScalarGauge::transform(const Generator& gamma) const {
    if (gamma.fibre_dim() != 1) fail(ErrorKind::Config, "scalar gauge applies to line bundles only");
    const ScalarGauge self = *this;
    return Generator(
        1,
        [gamma, self](double s, std::size_t piece) {
            const cd a = self.value(s);
            if (a == cd(0.0, 0.0)) fail(ErrorKind::Singularity, "gauge factor a vanishes on the path");
            return Mat(gamma.on_piece(s, piece).array() + self.derivative(s) / a);
        },
        gamma.breakpoints(), gamma.id());
}

cd ScalarGauge::transform(cd l, double s, double t) const {
    const cd at = value(t);
    if (at == cd(0.0, 0.0)) fail(ErrorKind::Singularity, "gauge factor a vanishes on the path");
    return value(s) / at * l;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> simpson_weights(std::size_t nodes) {
    const std::size_t m = intervals_for(nodes);
    if (m % 2 != 0) fail(ErrorKind::Config, "Simpson quadrature needs an odd node count");
    std::vector<double> w(m + 1);
    for (std::size_t j = 0; j <= m; ++j) w[j] = (j == 0 || j == m) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    for (double& x : w) x /= 3.0 * static_cast<double>(m);
    return w;
}

// d f0 / d x^axis at a lattice point from neighbouring samples (second order where possible).
cd lattice_derivative(const Lattice& lattice, const std::vector<cd>& f, std::vector<std::size_t> idx,
                      std::size_t axis) {
    const auto& xs = lattice.axis(axis);
    const std::size_t n = xs.size();
    const std::size_t i = idx[axis];
    auto at = [&](std::size_t j) {
        idx[axis] = j;
        return f[lattice.flat_index(idx)];
    };
    if (n == 2) return (at(1) - at(0)) / (xs[1] - xs[0]);
    if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (xs[2] - xs[0]);
    if (i == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (xs[n - 1] - xs[n - 3]);
    return (at(i + 1) - at(i - 1)) / (xs[i + 1] - xs[i - 1]);
}

}  // namespace

NormalFrameResult solve_normal_frame(const CoefficientField& field, const RegionSpec& region, const Point& basepoint,
                                     double tol, const NormalFrameOptions& opts) {
    if (field.fibre_dim() != 1) fail(ErrorKind::Config, "normal frame solver needs a line bundle (k = 1)");
    if (region.is_slice()) fail(ErrorKind::Config, "normal frame solver needs a box region");
    if (region.dim() != field.dim()) fail(ErrorKind::Config, "region dimension does not match the chart");
    field.space().check_point(basepoint);
    if (!region.contains(basepoint)) fail(ErrorKind::Config, "basepoint lies outside the region", "basepoint");
    for (std::size_t a = 0; a < region.dim(); ++a) {
        if (!(region.intervals()[a].lo < region.intervals()[a].hi)) {
            fail(ErrorKind::Config, "normal frame region must have positive width on every axis", "region.box");
        }
    }

    NormalFrameResult out;
    out.flatness = is_flat(field, region, tol, opts.exec);
    if (!out.flatness.flat) {
        const auto [mu, nu] = out.flatness.argmax_component;
        fail(ErrorKind::Gate,
             "no normal frame: curvature R_" + std::to_string(mu) + std::to_string(nu) + " reaches " +
                 fmt(out.flatness.max_violation) + " > tol " + fmt(tol) + " at " + point_string(out.flatness.argmax_point),
             point_string(out.flatness.argmax_point));
    }

    const std::size_t n = field.dim();
    const Lattice lattice(region);
    const std::vector<double> w = simpson_weights(opts.quad_nodes);
    const std::size_t m = w.size() - 1;

    // f0(x) = integral_0^1 A_mu(b + tau d) d^mu dtau, d = x - b
    out.f0 = lattice_map(
        lattice,
        [&](const Point& x) {
            std::vector<double> d(n), y(n);
            std::vector<cd> a(n);
            for (std::size_t mu = 0; mu < n; ++mu) d[mu] = x[mu] - basepoint[mu];
            cd sum(0.0, 0.0);
            bool moved = false;
            for (double dm : d) moved = moved || dm != 0.0;
            if (!moved) return sum;
            for (std::size_t j = 0; j <= m; ++j) {
                const double tau = static_cast<double>(j) / static_cast<double>(m);
                for (std::size_t mu = 0; mu < n; ++mu) y[mu] = basepoint[mu] + tau * d[mu];
                field.evaluate_into(y, a);
                cd dot(0.0, 0.0);
                for (std::size_t mu = 0; mu < n; ++mu) dot += a[mu] * d[mu];
                sum += w[j] * dot;
            }
            return sum;
        },
        opts.exec);

    // A'_mu = A_mu - d f0/dx^mu with the gradient differentiated under the integral sign
    const FieldJacobian jacobian(field);
    out.transformed_max = lattice_max(
                              lattice,
                              [&](const Point& x) {
                                  std::vector<double> d(n), y(n);
                                  std::vector<cd> a(n), da(n * n), grad(n, cd(0.0, 0.0));
                                  for (std::size_t mu = 0; mu < n; ++mu) d[mu] = x[mu] - basepoint[mu];
                                  for (std::size_t j = 0; j <= m; ++j) {
                                      const double tau = static_cast<double>(j) / static_cast<double>(m);
                                      for (std::size_t mu = 0; mu < n; ++mu) y[mu] = basepoint[mu] + tau * d[mu];
                                      field.evaluate_into(y, a);
                                      jacobian.evaluate_into(y, da);
                                      for (std::size_t mu = 0; mu < n; ++mu) {
                                          cd term = a[mu];
                                          for (std::size_t nu = 0; nu < n; ++nu) {
                                              term += tau * da[nu * n + mu] * d[nu];  // d A_nu / d x^mu
                                          }
                                          grad[mu] += w[j] * term;
                                      }
                                  }
                                  field.evaluate_into(x, a);
                                  double worst = 0.0;
                                  for (std::size_t mu = 0; mu < n; ++mu) worst = std::max(worst, std::abs(a[mu] - grad[mu]));
                                  return worst;
                              },
                              opts.exec)
                              .value;

    out.points.reserve(lattice.size());
    out.gauge.reserve(lattice.size());
    std::vector<cd> a(n);
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        out.points.push_back(lattice.point(i));
        out.gauge.push_back(std::exp(-out.f0[i]));
        field.evaluate_into(out.points.back(), a);
        const auto idx = lattice.multi_index(i);
        for (std::size_t mu = 0; mu < n; ++mu) {
            out.residual = std::max(out.residual, std::abs(a[mu] - lattice_derivative(lattice, out.f0, idx, mu)));
        }
    }

    // probe loops basepoint -> c_j -> c_{j+1} -> basepoint over box corners in Gray-code order
    if (n <= 12) {
        const std::size_t corners = std::size_t{1} << n;
        auto corner = [&](std::size_t j) {
            const std::size_t g = j ^ (j >> 1);
            Point c(n);
            for (std::size_t a = 0; a < n; ++a) {
                c[a] = (g >> a) & 1u ? region.intervals()[a].hi : region.intervals()[a].lo;
            }
            return c;
        };
        for (std::size_t j = 0; j < corners; ++j) {
            std::vector<Point> vertices{basepoint};
            for (const Point& c : {corner(j), corner((j + 1) % corners), basepoint}) {
                if (c != vertices.back()) vertices.push_back(c);
            }
            if (vertices.size() < 4) continue;
            const PathCurve loop = PathCurve::polyline(field.space(), vertices, 0.0, 1.0);
            const ScalarTransport hol = holonomy(field, loop, QuadratureOptions{opts.quad_nodes});
            out.path_independence_defect = std::max(out.path_independence_defect, std::abs(hol.value - 1.0));
        }
    }
    if (out.path_independence_defect > opts.path_defect_limit) {
        fail(ErrorKind::Gate, "no normal frame: transport is path dependent on the region (probe loop defect " +
                                  fmt(out.path_independence_defect) + ")");
    }
    return out;
}

}  // namespace pathtrans
