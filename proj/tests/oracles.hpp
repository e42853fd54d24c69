#pragma once

// Reference computations used only by the tests. They avoid the library's
// own numerics: matrix exponentials by plain Taylor series, derivatives by
// finite differences, transports by closed forms.

#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// exp(A) by scaling and squaring around a 40-term Taylor series.
inline Mat taylor_expm(const Mat& a) {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) norm = std::max(norm, std::abs(a.data()[i]));
    int squarings = 0;
    while (norm * a.rows() > 0.25) {
        norm /= 2.0;
        ++squarings;
    }
    const Mat x = a / std::pow(2.0, squarings);
    Mat term = Mat::Identity(a.rows(), a.cols());
    Mat sum = term;
    for (int n = 1; n <= 40; ++n) {
        term = term * x / static_cast<double>(n);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

/// Fourth-order central difference of a scalar function of one variable.
inline cd derivative(const std::function<cd(double)>& f, double x, double h = 1e-3) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

inline Mat derivative(const std::function<Mat(double)>& f, double x, double h = 1e-3) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

inline double max_abs(const Mat& m) {
    double out = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) out = std::max(out, std::abs(m.data()[i]));
    return out;
}

/// Least-squares slope of log(err) against log(n).
inline double log_slope(const std::vector<double>& n, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto m = static_cast<double>(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double x = std::log(n[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

}  // namespace oracle
