#pragma once

// General k-dimensional linear transports along paths: the transport matrix
// L(t, s) solves dL(tau, s)/dtau = -Gamma(tau) L(tau, s), L(s, s) = 1, where
// Gamma is the 2-index coefficient along the path.

#include <functional>
#include <string>
#include <vector>

#include "pathtrans/fields.hpp"
#include "pathtrans/geometry.hpp"
#include "pathtrans/linalg.hpp"

namespace pathtrans {

enum class Scheme { Rk4, Magnus2 };

struct TransportOptions {
    std::size_t steps = 200;
    Scheme scheme = Scheme::Rk4;
};

/// Matrix of the transport from s_from to s_to along path_id.
struct TransportResult {
    Mat matrix;
    double s_from = 0.0;
    double s_to = 0.0;
    std::string path_id;
    double est_error = 0.0;
};

/// 2-index coefficient sampler s -> Gamma(s) with optional breakpoints where
/// it may jump (polyline vertices). Piece i spans [breakpoints[i], breakpoints[i+1]].
class Generator {
public:
    using Fn = std::function<Mat(double s, std::size_t piece)>;

    Generator(std::size_t k, Fn fn, std::vector<double> breakpoints = {}, std::string id = "sampler");

    /// Gamma(s; gamma) = Gamma_mu(gamma(s)) gamma-dot^mu(s).
    static Generator along(const CoefficientField& field, const PathCurve& path);

    std::size_t fibre_dim() const { return k_; }
    const std::string& id() const { return id_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    Mat operator()(double s) const { return fn_(s, piece_at(s)); }
    Mat on_piece(double s, std::size_t piece) const { return fn_(s, piece); }

    std::size_t piece_at(double s) const;
    std::size_t piece_between(double a, double b) const { return piece_at(0.5 * (a + b)); }

private:
    std::size_t k_;
    Fn fn_;
    std::vector<double> breakpoints_;
    std::string id_;
};

/// Integrates L(t, s). t < s integrates backwards with a negative step.
/// est_error is the max-entry difference between N and 2N steps plus a
/// round-off allowance; the returned matrix is the N-step solution.
TransportResult integrate_transport(const Generator& gamma, double s, double t, const TransportOptions& opts = {});
TransportResult integrate_transport(const CoefficientField& field, const PathCurve& path, double s, double t,
                                    const TransportOptions& opts = {});

/// l1 after l2: requires l1.s_from == l2.s_to on the same path.
TransportResult compose(const TransportResult& l1, const TransportResult& l2);

/// F(s; gamma) as k x k expressions in `s`, optionally left-multiplied by a
/// constant invertible D (the freedom F -> D F that leaves L unchanged).
class FrameFunction {
public:
    FrameFunction(std::size_t k, std::vector<Expression> entries, std::string id = "frame-function");
    FrameFunction with_left_factor(const Mat& d) const;

    std::size_t fibre_dim() const { return k_; }
    const std::string& id() const { return id_; }
    Mat value(double s) const;

private:
    std::size_t k_;
    std::vector<Expression> entries_;
    std::vector<Program> programs_;
    Mat left_;
    std::string id_;
};

/// L(t, s) = F^{-1}(t) F(s).
TransportResult from_frame_function(const FrameFunction& f, double s, double t);

/// Anything that yields transport matrices L(to, from).
using TransportSource = std::function<Mat(double from, double to)>;

/// Gamma(s) = dL(s, t)/dt at t = s by a Richardson-extrapolated central difference.
Mat extract_coefficients(const TransportSource& source, double s, double h);
Mat extract_coefficients(const CoefficientField& field, const PathCurve& path, double s, double h,
                         const TransportOptions& opts = {});
Mat extract_coefficients(const FrameFunction& f, double s, double h);

/// Components lambda^i(s) of a lifting along a path, as expressions in `s`.
struct Lifting {
    std::vector<Expression> components;
};

/// D_s lambda = (d lambda^i/ds + Gamma^i_j lambda^j) e_i.
CVec derivation_apply(const CoefficientField& field, const PathCurve& path, const Lifting& lifting, double s);

/// L' = A^{-1}(t) L A(s).
TransportResult transform_matrix_law(const TransportResult& l, const PathFrameChange& a);

/// Gamma' = A^{-1} Gamma A + A^{-1} dA/ds.
Generator transform_coefficients_law(const Generator& gamma, const PathFrameChange& a);

/// Frame normal along a single path: A(s) = L(s, s_ref) turns the transport
/// matrix into the identity along that path.
class PathNormalFrame {
public:
    PathNormalFrame(Generator gamma, double s_ref, TransportOptions opts = {});

    Mat change(double s) const;

    /// Gamma'(s) = A^{-1} Gamma A + A^{-1} dA/ds with dA/ds from short
    /// transports around s (step h); vanishes when the frame is normal.
    Mat transformed_coefficient(double s, double h = 1e-3) const;

private:
    Generator gamma_;
    double s_ref_;
    TransportOptions opts_;
};

}  // namespace pathtrans
