#include "pathtrans/linalg.hpp"

#include <cmath>
#include <string>

#include "pathtrans/error.hpp"

namespace pathtrans {

double max_abs(const Mat& m) {
    double out = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out = std::max(out, std::abs(m(i, j)));
    }
    return out;
}

Mat checked_inverse(const Mat& m, const char* what) {
    if (m.rows() != m.cols()) fail(ErrorKind::Config, std::string(what) + " is not square");
    if (m.rows() == 1) {
        if (m(0, 0) == cd(0.0, 0.0)) fail(ErrorKind::Singularity, std::string(what) + " is singular");
        return Mat::Constant(1, 1, cd(1.0, 0.0) / m(0, 0));
    }
    Eigen::PartialPivLU<Mat> lu(m);
    const double scale = std::max(max_abs(m), 1e-300);
    const auto& u = lu.matrixLU();
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        if (std::abs(u(i, i)) <= 1e-14 * scale) fail(ErrorKind::Singularity, std::string(what) + " is singular");
    }
    return lu.inverse();
}

namespace {

Mat expm_2x2(const Mat& m) {
    // m = mu*I + n with n traceless, n^2 = delta*I, delta = -det(n)
    const cd mu = 0.5 * (m(0, 0) + m(1, 1));
    Mat n = m;
    n(0, 0) -= mu;
    n(1, 1) -= mu;
    const cd delta = n(0, 0) * n(0, 0) + n(0, 1) * n(1, 0);
    const cd root = std::sqrt(delta);
    cd c;
    cd s;  // sinh(root)/root
    if (std::abs(delta) < 1e-8) {
        c = 1.0 + delta / 2.0 + delta * delta / 24.0 + delta * delta * delta / 720.0;
        s = 1.0 + delta / 6.0 + delta * delta / 120.0 + delta * delta * delta / 5040.0;
    } else {
        c = std::cosh(root);
        s = std::sinh(root) / root;
    }
    Mat out = s * n;
    out(0, 0) += c;
    out(1, 1) += c;
    return std::exp(mu) * out;
}

Mat expm_pade6(const Mat& m) {
    // Pade(6,6) coefficients c_j = (12-j)! 6! / (12! j! (6-j)!)
    static constexpr double c[] = {1.0,
                                   1.0 / 2.0,
                                   5.0 / 44.0,
                                   1.0 / 66.0,
                                   1.0 / 792.0,
                                   1.0 / 15840.0,
                                   1.0 / 665280.0};
    const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
    const Mat a = m / std::ldexp(1.0, squarings);
    const Eigen::Index k = m.rows();
    const Mat id = Mat::Identity(k, k);
    const Mat a2 = a * a;
    const Mat a4 = a2 * a2;
    const Mat a6 = a4 * a2;
    const Mat even = c[0] * id + c[2] * a2 + c[4] * a4 + c[6] * a6;
    const Mat odd = a * (c[1] * id + c[3] * a2 + c[5] * a4);
    Mat r = (even - odd).partialPivLu().solve(even + odd);
    for (int i = 0; i < squarings; ++i) r = r * r;
    return r;
}

}  // namespace

Mat expm(const Mat& m) {
    if (m.rows() != m.cols()) fail(ErrorKind::Config, "expm of a non-square matrix");
    if (m.rows() == 1) return Mat::Constant(1, 1, std::exp(m(0, 0)));
    if (m.rows() == 2) return expm_2x2(m);
    return expm_pade6(m);
}

}  // namespace pathtrans
