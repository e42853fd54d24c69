#pragma once

#include <utility>
#include <vector>

#include "pathtrans/fields.hpp"
#include "pathtrans/lattice.hpp"
#include "pathtrans/linalg.hpp"

namespace pathtrans {

/// R_mu_nu = -d Gamma_mu/dx^nu + d Gamma_nu/dx^mu + Gamma_mu Gamma_nu - Gamma_nu Gamma_mu at a point.
struct CurvatureAtPoint {
    Point point;
    std::size_t dim = 0;
    std::vector<Mat> components;  // components[mu * dim + nu]

    const Mat& at(std::size_t mu, std::size_t nu) const { return components[mu * dim + nu]; }
};

/// Field plus its compiled symbolic Jacobian, reusable across many points.
class CurvatureEvaluator {
public:
    explicit CurvatureEvaluator(const CoefficientField& field);

    const CoefficientField& field() const { return jacobian_.field(); }

    CurvatureAtPoint at(const Point& p) const;

    /// Largest |R_mu_nu| entry over the listed (mu < nu) pairs; `which` receives the pair.
    double max_violation(const Point& p, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                         std::pair<std::size_t, std::size_t>* which = nullptr) const;

private:
    FieldJacobian jacobian_;
};

CurvatureAtPoint curvature_at(const CoefficientField& field, const Point& p);

struct FlatnessReport {
    bool flat = true;
    double max_violation = 0.0;
    Point argmax_point;
    std::pair<std::size_t, std::size_t> argmax_component{0, 1};
    std::size_t lattice_points = 0;
    double tol = 0.0;
};

inline constexpr double kDefaultFlatnessTol = 1e-8;
inline constexpr std::size_t kDefaultSamplesPerAxis = 9;

/// Samples R_mu_nu over a box lattice; flat iff every entry stays within tol.
FlatnessReport is_flat(const CoefficientField& field, const RegionSpec& region, double tol = kDefaultFlatnessTol,
                       Exec exec = Exec::Parallel);

/// Same test restricted to pairs of free coordinates of a slice region.
FlatnessReport is_flat_on_slice(const CoefficientField& field, const RegionSpec& region,
                                double tol = kDefaultFlatnessTol, Exec exec = Exec::Parallel);

/// Gamma'_mu = B_mu^nu A^{-1} (Gamma_nu A + d A/dx^nu), built symbolically.
CoefficientField transform_three_index(const CoefficientField& field, const FrameChange& change);

}  // namespace pathtrans
