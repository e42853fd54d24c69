#include "pathtrans/curvature.hpp"

#include <cmath>
#include <cstdio>

#include "pathtrans/error.hpp"

namespace pathtrans {

CurvatureEvaluator::CurvatureEvaluator(const CoefficientField& field) : jacobian_(field) {}

CurvatureAtPoint CurvatureEvaluator::at(const Point& p) const {
    const CoefficientField& field = jacobian_.field();
    field.space().check_point(p);
    const std::size_t n = field.dim();
    const std::size_t k = field.fibre_dim();
    const std::vector<Mat> gamma = field.evaluate(p);
    std::vector<cd> d(n * n * k * k);
    jacobian_.evaluate_into(p, d);
    auto partial = [&](std::size_t mu, std::size_t nu) {
        Mat m(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) m(i, j) = d[(mu * n + nu) * k * k + i * k + j];
        }
        return m;
    };
    CurvatureAtPoint out{p, n, std::vector<Mat>(n * n, Mat::Zero(k, k))};
    for (std::size_t mu = 0; mu < n; ++mu) {
        for (std::size_t nu = mu + 1; nu < n; ++nu) {
            Mat r = -partial(mu, nu) + partial(nu, mu);
            if (k > 1) r += gamma[mu] * gamma[nu] - gamma[nu] * gamma[mu];
            out.components[nu * n + mu] = -r;
            out.components[mu * n + nu] = std::move(r);
        }
    }
    return out;
}

double CurvatureEvaluator::max_violation(const Point& p, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                         std::pair<std::size_t, std::size_t>* which) const {
    const CurvatureAtPoint c = at(p);
    double worst = -1.0;
    for (const auto& pr : pairs) {
        const double v = max_abs(c.at(pr.first, pr.second));
        if (v > worst) {
            worst = v;
            if (which) *which = pr;
        }
    }
    return std::max(worst, 0.0);
}

CurvatureAtPoint curvature_at(const CoefficientField& field, const Point& p) { return CurvatureEvaluator(field).at(p); }

namespace {

FlatnessReport scan(const CoefficientField& field, const RegionSpec& region, double tol, Exec exec) {
    if (!(tol > 0.0)) fail(ErrorKind::Config, "flatness tolerance must be positive");
    if (region.dim() != field.dim()) fail(ErrorKind::Config, "region dimension does not match the chart");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t mu = 0; mu < field.dim(); ++mu) {
        for (std::size_t nu = mu + 1; nu < field.dim(); ++nu) {
            if (region.is_free(mu) && region.is_free(nu)) pairs.emplace_back(mu, nu);
        }
    }
    const Lattice lattice(region);
    FlatnessReport report;
    report.tol = tol;
    report.lattice_points = lattice.size();
    if (pairs.empty()) {
        report.argmax_point = lattice.point(0);
        return report;
    }
    const CurvatureEvaluator curvature(field);
    const LatticeMax worst =
        lattice_max(lattice, [&](const Point& p) { return curvature.max_violation(p, pairs); }, exec);
    report.argmax_point = lattice.point(worst.index);
    report.max_violation = curvature.max_violation(report.argmax_point, pairs, &report.argmax_component);
    report.flat = report.max_violation <= tol;
    return report;
}

}  // namespace

FlatnessReport is_flat(const CoefficientField& field, const RegionSpec& region, double tol, Exec exec) {
    if (region.is_slice()) fail(ErrorKind::Config, "is_flat expects a box region; use is_flat_on_slice");
    return scan(field, region, tol, exec);
}

FlatnessReport is_flat_on_slice(const CoefficientField& field, const RegionSpec& region, double tol, Exec exec) {
    if (!region.is_slice()) fail(ErrorKind::Config, "is_flat_on_slice expects a slice region");
    return scan(field, region, tol, exec);
}

// ---------------------------------------------------------------------------

namespace {

using ExprMatrix = std::vector<Expression>;  // row-major k x k

Expression symbolic_det(const ExprMatrix& m, std::size_t k) {
    if (k == 1) return m[0];
    if (k == 2) return m[0] * m[3] - m[1] * m[2];
    Expression det;
    for (std::size_t col = 0; col < k; ++col) {
        if (m[col].is_zero()) continue;
        ExprMatrix minor;
        for (std::size_t r = 1; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c) {
                if (c != col) minor.push_back(m[r * k + c]);
            }
        }
        Expression term = m[col] * symbolic_det(minor, k - 1);
        det = (col % 2 == 0) ? det + term : det - term;
    }
    return det;
}

ExprMatrix symbolic_inverse(const ExprMatrix& m, std::size_t k, const char* what) {
    const Expression det = symbolic_det(m, k);
    if (det.is_zero()) fail(ErrorKind::Singularity, std::string(what) + " is singular");
    if (k == 1) return {Expression::number(1.0) / m[0]};
    ExprMatrix inv(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            // inv(i, j) = cofactor(j, i) / det
            ExprMatrix minor;
            for (std::size_t r = 0; r < k; ++r) {
                for (std::size_t c = 0; c < k; ++c) {
                    if (r != j && c != i) minor.push_back(m[r * k + c]);
                }
            }
            Expression cof = symbolic_det(minor, k - 1);
            if ((i + j) % 2 == 1) cof = -cof;
            inv[i * k + j] = cof / det;
        }
    }
    return inv;
}

ExprMatrix product(const ExprMatrix& a, const ExprMatrix& b, std::size_t k) {
    ExprMatrix out(k * k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            Expression sum;
            for (std::size_t l = 0; l < k; ++l) sum = sum + a[i * k + l] * b[l * k + j];
            out[i * k + j] = sum;
        }
    }
    return out;
}

}  // namespace

CoefficientField transform_three_index(const CoefficientField& field, const FrameChange& change) {
    if (!(change.space() == field.space())) fail(ErrorKind::Config, "frame change lives on a different chart");
    const std::size_t k = field.fibre_dim();
    const std::size_t n = field.dim();
    if (change.fibre_dim() != k) fail(ErrorKind::Config, "frame change has the wrong fibre dimension");
    const ExprMatrix& a = change.bundle_entries();
    const auto& names = field.space().names();

    // Gamma_nu + A^{-1} d_nu A (k = 1: Gamma_nu + d_nu a / a), per direction nu.
    std::vector<ExprMatrix> shifted(n);
    if (k == 1) {
        if (a[0].is_zero()) fail(ErrorKind::Singularity, "frame change a(x) is identically zero");
        for (std::size_t nu = 0; nu < n; ++nu) {
            Expression da = differentiate(a[0], names[nu]);
            shifted[nu] = {field.entry(nu, 0, 0) + (da.is_zero() ? Expression() : da / a[0])};
        }
    } else {
        const ExprMatrix inv = symbolic_inverse(a, k, "frame change A(x)");
        for (std::size_t nu = 0; nu < n; ++nu) {
            ExprMatrix da(k * k);
            for (std::size_t e = 0; e < k * k; ++e) da[e] = differentiate(a[e], names[nu]);
            ExprMatrix ga = product(field.block(nu), a, k);
            for (std::size_t e = 0; e < k * k; ++e) ga[e] = ga[e] + da[e];
            shifted[nu] = product(inv, ga, k);
        }
    }

    std::vector<std::vector<Expression>> blocks(n, ExprMatrix(k * k));
    if (!change.base()) {
        blocks = std::move(shifted);
    } else {
        const auto& b = *change.base();
        // numeric B can be checked for invertibility up front
        bool numeric = true;
        for (const auto& e : b) numeric = numeric && e.is_number();
        if (numeric) {
            Mat bm(n, n);
            for (std::size_t i = 0; i < n * n; ++i) bm(i / n, i % n) = b[i].node().value;
            checked_inverse(bm, "base frame change B");
        } else if (symbolic_det(b, n).is_zero()) {
            fail(ErrorKind::Singularity, "base frame change B is singular");
        }
        for (std::size_t mu = 0; mu < n; ++mu) {
            for (std::size_t e = 0; e < k * k; ++e) {
                Expression sum;
                for (std::size_t nu = 0; nu < n; ++nu) sum = sum + b[mu * n + nu] * shifted[nu][e];
                blocks[mu][e] = sum;
            }
        }
    }
    return CoefficientField(field.space(), k, std::move(blocks), field.guard(), field.label() + "'");
}

}  // namespace pathtrans
