#include "pathtrans/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathtrans/error.hpp"

namespace pathtrans {

Generator::Generator(std::size_t k, Fn fn, std::vector<double> breakpoints, std::string id)
    : k_(k), fn_(std::move(fn)), breakpoints_(std::move(breakpoints)), id_(std::move(id)) {
    std::sort(breakpoints_.begin(), breakpoints_.end());
}

Generator Generator::along(const CoefficientField& field, const PathCurve& path) {
    if (!(path.space() == field.space())) fail(ErrorKind::Config, "path and field live on different charts");
    return Generator(
        field.fibre_dim(),
        [field, path](double s, std::size_t piece) { return pullback_on_piece(field, path, s, piece); },
        path.breakpoints(), path.id());
}

std::size_t Generator::piece_at(double s) const {
    if (breakpoints_.size() < 3) return 0;
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breakpoints_.begin() - 1, 0));
    return std::min(idx, breakpoints_.size() - 2);
}

namespace {

bool all_finite(const Mat& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cd v = m.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

// Sub-intervals of [s, t] (in the direction of travel) separated by interior breakpoints.
std::vector<std::pair<double, double>> split(const Generator& g, double s, double t) {
    std::vector<double> cuts{s};
    const double lo = std::min(s, t);
    const double hi = std::max(s, t);
    std::vector<double> inner;
    for (double b : g.breakpoints()) {
        if (b > lo && b < hi) inner.push_back(b);
    }
    if (t < s) std::reverse(inner.begin(), inner.end());
    cuts.insert(cuts.end(), inner.begin(), inner.end());
    cuts.push_back(t);
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out.emplace_back(cuts[i], cuts[i + 1]);
    return out;
}

Mat integrate_fixed(const Generator& g, double s, double t, std::size_t steps, Scheme scheme) {
    const std::size_t k = g.fibre_dim();
    Mat l = Mat::Identity(k, k);
    const auto pieces = split(g, s, t);
    const double total = std::abs(t - s);
    for (const auto& [a, b] : pieces) {
        const std::size_t piece = g.piece_between(a, b);
        const auto n = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(static_cast<double>(steps) * std::abs(b - a) / total)));
        const double h = (b - a) / static_cast<double>(n);
        auto node = [&](std::size_t j) { return j == n ? b : a + static_cast<double>(j) * h; };
        if (scheme == Scheme::Rk4) {
            Mat g0 = g.on_piece(a, piece);
            for (std::size_t j = 0; j < n; ++j) {
                const double tau = node(j);
                const double next = node(j + 1);
                const double step = next - tau;
                const Mat gm = g.on_piece(tau + 0.5 * step, piece);
                const Mat g1 = g.on_piece(next, piece);
                const Mat k1 = -g0 * l;
                const Mat k2 = -gm * (l + 0.5 * step * k1);
                const Mat k3 = -gm * (l + 0.5 * step * k2);
                const Mat k4 = -g1 * (l + step * k3);
                l += (step / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
                g0 = g1;
            }
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                const double tau = node(j);
                const double step = node(j + 1) - tau;
                l = expm(-step * g.on_piece(tau + 0.5 * step, piece)) * l;
            }
        }
        if (!all_finite(l)) fail(ErrorKind::Numerical, "transport matrix became non-finite");
    }
    return l;
}

}  // namespace

TransportResult integrate_transport(const Generator& gamma, double s, double t, const TransportOptions& opts) {
    if (opts.steps < 1) fail(ErrorKind::Config, "steps must be >= 1");
    const std::size_t k = gamma.fibre_dim();
    if (s == t) return TransportResult{Mat::Identity(k, k), s, t, gamma.id(), 0.0};
    const Mat coarse = integrate_fixed(gamma, s, t, opts.steps, opts.scheme);
    const Mat fine = integrate_fixed(gamma, s, t, 2 * opts.steps, opts.scheme);
    const double roundoff =
        2.0 * static_cast<double>(opts.steps) * std::numeric_limits<double>::epsilon() * std::max(1.0, max_abs(fine));
    return TransportResult{coarse, s, t, gamma.id(), max_abs(coarse - fine) + roundoff};
}

TransportResult integrate_transport(const CoefficientField& field, const PathCurve& path, double s, double t,
                                    const TransportOptions& opts) {
    if (!path.contains(s) || !path.contains(t)) {
        fail(ErrorKind::Domain, "transport endpoints outside the path domain");
    }
    return integrate_transport(Generator::along(field, path), s, t, opts);
}

TransportResult compose(const TransportResult& l1, const TransportResult& l2) {
    if (l1.path_id != l2.path_id) fail(ErrorKind::Domain, "cannot compose transports along different paths");
    const double tol = 1e-12 * std::max(1.0, std::abs(l2.s_to));
    if (std::abs(l1.s_from - l2.s_to) > tol) {
        fail(ErrorKind::Domain, "cannot compose: first transport does not start where the second ends");
    }
    if (l1.matrix.rows() != l2.matrix.rows()) fail(ErrorKind::Domain, "cannot compose: fibre dimensions differ");
    return TransportResult{l1.matrix * l2.matrix, l2.s_from, l1.s_to, l1.path_id, l1.est_error + l2.est_error};
}

// ---------------------------------------------------------------------------

FrameFunction::FrameFunction(std::size_t k, std::vector<Expression> entries, std::string id)
    : k_(k), entries_(std::move(entries)), left_(Mat::Identity(k, k)), id_(std::move(id)) {
    if (k_ == 0 || entries_.size() != k_ * k_) fail(ErrorKind::Config, "frame function must have k*k entries");
    const std::vector<std::string> vars{PathCurve::kParameter};
    for (const auto& e : entries_) programs_.emplace_back(e, vars);
}

FrameFunction FrameFunction::with_left_factor(const Mat& d) const {
    if (d.rows() != static_cast<Eigen::Index>(k_) || d.cols() != static_cast<Eigen::Index>(k_)) {
        fail(ErrorKind::Config, "left factor has the wrong shape");
    }
    checked_inverse(d, "left factor D");
    FrameFunction out = *this;
    out.left_ = d * left_;
    return out;
}

Mat FrameFunction::value(double s) const {
    const cd arg[1] = {cd(s, 0.0)};
    Mat f(k_, k_);
    for (std::size_t i = 0; i < k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) f(i, j) = programs_[i * k_ + j](arg);
    }
    return left_ * f;
}

TransportResult from_frame_function(const FrameFunction& f, double s, double t) {
    const Mat fs = f.value(s);
    if (s == t) {
        checked_inverse(fs, "frame function F(s)");
        return TransportResult{Mat::Identity(f.fibre_dim(), f.fibre_dim()), s, t, f.id(), 0.0};
    }
    const Mat ft_inv = checked_inverse(f.value(t), "frame function F(t)");
    checked_inverse(fs, "frame function F(s)");
    return TransportResult{ft_inv * fs, s, t, f.id(), 0.0};
}

// ---------------------------------------------------------------------------

Mat extract_coefficients(const TransportSource& source, double s, double h) {
    if (!(h > 0.0)) fail(ErrorKind::Config, "finite-difference step must be positive");
    // L(s, s + d) is the transport from s + d back to s.
    auto central = [&](double d) { return Mat((source(s + d, s) - source(s - d, s)) / (2.0 * d)); };
    const Mat coarse = central(h);
    const Mat fine = central(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

Mat extract_coefficients(const CoefficientField& field, const PathCurve& path, double s, double h,
                         const TransportOptions& opts) {
    if (!path.contains(s - h) || !path.contains(s + h)) {
        fail(ErrorKind::Domain, "s +/- h leaves the path domain");
    }
    const Generator g = Generator::along(field, path);
    return extract_coefficients(
        [&](double from, double to) { return integrate_transport(g, from, to, opts).matrix; }, s, h);
}

Mat extract_coefficients(const FrameFunction& f, double s, double h) {
    return extract_coefficients([&](double from, double to) { return from_frame_function(f, from, to).matrix; }, s, h);
}

CVec derivation_apply(const CoefficientField& field, const PathCurve& path, const Lifting& lifting, double s) {
    const std::size_t k = field.fibre_dim();
    if (lifting.components.size() != k) fail(ErrorKind::Config, "lifting must have k components");
    const std::vector<std::string> vars{PathCurve::kParameter};
    const cd arg[1] = {cd(s, 0.0)};
    CVec value(k);
    CVec rate(k);
    for (std::size_t i = 0; i < k; ++i) {
        value(i) = Program(lifting.components[i], vars)(arg);
        rate(i) = Program(differentiate(lifting.components[i], PathCurve::kParameter), vars)(arg);
    }
    return rate + pullback(field, path, s) * value;
}

TransportResult transform_matrix_law(const TransportResult& l, const PathFrameChange& a) {
    if (static_cast<Eigen::Index>(a.fibre_dim()) != l.matrix.rows()) {
        fail(ErrorKind::Config, "frame change and transport have different fibre dimensions");
    }
    TransportResult out = l;
    out.matrix = a.inverse(l.s_to) * l.matrix * a.value(l.s_from);
    return out;
}

Generator transform_coefficients_law(const Generator& gamma, const PathFrameChange& a) {
    if (a.fibre_dim() != gamma.fibre_dim()) {
        fail(ErrorKind::Config, "frame change and coefficients have different fibre dimensions");
    }
    return Generator(
        gamma.fibre_dim(),
        [gamma, a](double s, std::size_t piece) {
            const Mat av = a.value(s);
            const Mat inv = checked_inverse(av, "frame change A(s)");
            return Mat(inv * (gamma.on_piece(s, piece) * av + a.derivative(s)));
        },
        gamma.breakpoints(), gamma.id());
}

// ---------------------------------------------------------------------------

PathNormalFrame::PathNormalFrame(Generator gamma, double s_ref, TransportOptions opts)
    : gamma_(std::move(gamma)), s_ref_(s_ref), opts_(opts) {}

Mat PathNormalFrame::change(double s) const { return integrate_transport(gamma_, s_ref_, s, opts_).matrix; }

Mat PathNormalFrame::transformed_coefficient(double s, double h) const {
    const Mat a = change(s);
    auto step = [&](double d) { return integrate_transport(gamma_, s, s + d, opts_).matrix; };
    Mat rate;  // d/dtau L(tau, s) at tau = s
    const auto& bp = gamma_.breakpoints();
    const bool low = !bp.empty() && s - h < bp.front();
    const bool high = !bp.empty() && s + h > bp.back();
    if (low || high) {
        // fourth-order one-sided stencil into the domain
        const double d = (low ? 0.5 : -0.5) * h;
        const Mat id = Mat::Identity(a.rows(), a.cols());
        rate = (-25.0 * id + 48.0 * step(d) - 36.0 * step(2 * d) + 16.0 * step(3 * d) - 3.0 * step(4 * d)) / (12.0 * d);
    } else {
        auto central = [&](double d) { return Mat((step(d) - step(-d)) / (2.0 * d)); };
        rate = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }
    const Mat inv = checked_inverse(a, "normal frame change A(s)");
    return inv * (gamma_(s) * a + rate * a);
}

}  // namespace pathtrans
