#pragma once

// First and second fundamental forms, Christoffel symbols and curvature
// scalars of an immersion, evaluated per parameter point from analytic jets.

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "nframes/surfaces.hpp"

namespace nframes {

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FundamentalForms {
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d g_inv = Eigen::Matrix2d::Zero();
    double W = 0.0;
    std::vector<Eigen::Matrix2d> L; // one symmetric 2x2 matrix per normal direction
    double conformality_defect = 0.0;
};

// g_ij = X_i . X_j,  L_(s,ij) = X_ij . N_s.  The frame rows must be
// orthonormal to 1e-10.
inline FundamentalForms fundamental_forms(const JetSample& jet, const Eigen::MatrixXd& N)
{
    const int n = static_cast<int>(N.rows());
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const double dot = N.row(a).dot(N.row(b));
            const double expect = (a == b) ? 1.0 : 0.0;
            if (std::abs(dot - expect) > 1e-10)
                throw geometry_error("fundamental_forms: frame is not orthonormal");
        }

    FundamentalForms f;
    f.g(0, 0) = jet.Xu.dot(jet.Xu);
    f.g(0, 1) = f.g(1, 0) = jet.Xu.dot(jet.Xv);
    f.g(1, 1) = jet.Xv.dot(jet.Xv);
    const double det = f.g(0, 0) * f.g(1, 1) - f.g(0, 1) * f.g(0, 1);
    if (!(det > 0.0)) throw geometry_error("fundamental_forms: degenerate metric (W^2 <= 0)");
    f.W = std::sqrt(det);
    f.g_inv << f.g(1, 1), -f.g(0, 1), -f.g(0, 1), f.g(0, 0);
    f.g_inv /= det;
    f.conformality_defect =
        std::max(std::abs(f.g(0, 0) - f.g(1, 1)), std::abs(f.g(0, 1)));

    f.L.resize(n);
    for (int s = 0; s < n; ++s) {
        Eigen::Matrix2d L;
        L(0, 0) = jet.Xuu.dot(N.row(s));
        L(0, 1) = L(1, 0) = jet.Xuv.dot(N.row(s));
        L(1, 1) = jet.Xvv.dot(N.row(s));
        f.L[s] = L;
    }
    return f;
}

struct ChristoffelSample {
    // G[k][i][j] = Gamma^k_ij, symmetric in (i,j)
    double G[2][2][2] = {};
};

namespace detail {

// g_ab,c from second-order jets
inline double metric_d1(const JetSample& jet, int a, int b, int c)
{
    auto d1 = [&](int i) -> const Eigen::VectorXd& { return i == 1 ? jet.Xu : jet.Xv; };
    return jet.d2(a, c).dot(d1(b)) + d1(a).dot(jet.d2(b, c));
}

// g_ab,cd from third-order jets
inline double metric_d2(const JetSample& jet, int a, int b, int c, int d)
{
    auto d1 = [&](int i) -> const Eigen::VectorXd& { return i == 1 ? jet.Xu : jet.Xv; };
    return jet.d3(a, c, d).dot(d1(b)) + jet.d2(a, c).dot(jet.d2(b, d)) +
           jet.d2(a, d).dot(jet.d2(b, c)) + d1(a).dot(jet.d3(b, c, d));
}

} // namespace detail

inline ChristoffelSample christoffel(const JetSample& jet)
{
    const FundamentalForms f = fundamental_forms(jet, Eigen::MatrixXd(0, jet.ambient_dim()));
    ChristoffelSample c;
    for (int k = 1; k <= 2; ++k)
        for (int i = 1; i <= 2; ++i)
            for (int j = i; j <= 2; ++j) {
                double acc = 0.0;
                for (int l = 1; l <= 2; ++l)
                    acc += 0.5 * f.g_inv(k - 1, l - 1) *
                           (detail::metric_d1(jet, l, i, j) + detail::metric_d1(jet, j, l, i) -
                            detail::metric_d1(jet, i, j, l));
                c.G[k - 1][i - 1][j - 1] = acc;
                c.G[k - 1][j - 1][i - 1] = acc;
            }
    return c;
}

struct ChristoffelDerivatives {
    // dG[k][i][j][m] = d Gamma^k_ij / d u^m  (analytic, third-order jets)
    double dG[2][2][2][2] = {};
};

inline ChristoffelDerivatives christoffel_derivatives(const JetSample& jet)
{
    const FundamentalForms f = fundamental_forms(jet, Eigen::MatrixXd(0, jet.ambient_dim()));

    // d g^{kl} / d u^m = - g^{ka} g_ab,m g^{bl}
    double dginv[2][2][2];
    for (int k = 1; k <= 2; ++k)
        for (int l = 1; l <= 2; ++l)
            for (int m = 1; m <= 2; ++m) {
                double acc = 0.0;
                for (int a = 1; a <= 2; ++a)
                    for (int b = 1; b <= 2; ++b)
                        acc -= f.g_inv(k - 1, a - 1) * detail::metric_d1(jet, a, b, m) *
                               f.g_inv(b - 1, l - 1);
                dginv[k - 1][l - 1][m - 1] = acc;
            }

    ChristoffelDerivatives d;
    for (int k = 1; k <= 2; ++k)
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                for (int m = 1; m <= 2; ++m) {
                    double acc = 0.0;
                    for (int l = 1; l <= 2; ++l) {
                        const double bracket = detail::metric_d1(jet, l, i, j) +
                                               detail::metric_d1(jet, j, l, i) -
                                               detail::metric_d1(jet, i, j, l);
                        const double dbracket = detail::metric_d2(jet, l, i, j, m) +
                                                detail::metric_d2(jet, j, l, i, m) -
                                                detail::metric_d2(jet, i, j, l, m);
                        acc += 0.5 * (dginv[k - 1][l - 1][m - 1] * bracket +
                                      f.g_inv(k - 1, l - 1) * dbracket);
                    }
                    d.dG[k - 1][i - 1][j - 1][m - 1] = acc;
                }
    return d;
}

struct CurvatureScalars {
    Eigen::VectorXd K_sigma; // det L_s / W^2
    Eigen::VectorXd H_sigma; // (1/2) tr(g^-1 L_s)
    double K = 0.0;          // sum of K_sigma
    double R2112 = 0.0;      // K W^2
};

inline CurvatureScalars curvatures(const FundamentalForms& f)
{
    const int n = static_cast<int>(f.L.size());
    CurvatureScalars c;
    c.K_sigma.resize(n);
    c.H_sigma.resize(n);
    const double W2 = f.W * f.W;
    for (int s = 0; s < n; ++s) {
        c.K_sigma[s] = f.L[s].determinant() / W2;
        c.H_sigma[s] = 0.5 * (f.g_inv * f.L[s]).trace();
    }
    c.K = c.K_sigma.sum();
    c.R2112 = c.K * W2;
    return c;
}

// Essential Riemann component from the Christoffel route:
//   R^l_ijk = G^l_ij,k - G^l_ik,j + sum_m (G^m_ij G^l_mk - G^m_ik G^l_mj)
//   R_2112 = sum_l R^l_112 g_l2
// Independent of the L-route K W^2 (theorema egregium check).
inline double riemann_r2112(const JetSample& jet)
{
    const FundamentalForms f = fundamental_forms(jet, Eigen::MatrixXd(0, jet.ambient_dim()));
    const ChristoffelSample c = christoffel(jet);
    const ChristoffelDerivatives d = christoffel_derivatives(jet);
    double out = 0.0;
    const int i = 0, j = 0, k = 1; // (i,j,k) = (1,1,2)
    for (int l = 0; l < 2; ++l) {
        double r = d.dG[l][i][j][k] - d.dG[l][i][k][j];
        for (int m = 0; m < 2; ++m)
            r += c.G[m][i][j] * c.G[l][m][k] - c.G[m][i][k] * c.G[l][m][j];
        out += r * f.g(l, 1);
    }
    return out;
}

} // namespace nframes
