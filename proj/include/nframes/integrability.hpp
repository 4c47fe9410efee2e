#pragma once

// Integrability conditions of the moving-frame equations evaluated as
// numerical residuals: Gauss equations, Weingarten equations,
// Codazzi-Mainardi, Gauss integrability, Ricci, theorema egregium and the
// mean curvature system.
//
// Gauss, Weingarten and the egregium comparison run fully analytically
// (third-order jets supply the Christoffel derivatives).  Codazzi-Mainardi,
// Gauss integrability and Ricci differentiate the computed fields L, Gamma
// and T by centered grid differences, so their residuals carry the O(h^2)
// tolerance of that path.

#include <Eigen/Dense>
#include <vector>

#include "nframes/frames.hpp"
#include "nframes/geometry.hpp"
#include "nframes/grid.hpp"

namespace nframes {

struct ResidualReport {
    double gauss_eq = 0.0;
    double weingarten = 0.0;
    double codazzi_mainardi = 0.0;
    double gauss_integrability = 0.0;
    double ricci = 0.0;
    double egregium = 0.0;
    double mean_curvature_system = 0.0;
    bool mean_curvature_skipped = false;
};

// Fundamental forms for every node of a surface grid.
inline std::vector<FundamentalForms> forms_field(const SurfaceGrid& sg, const FrameField& F)
{
    require_same_grid(sg.grid, F.grid);
    std::vector<FundamentalForms> out(sg.grid.size());
    parallel_for(0, out.size(), [&](std::size_t idx) {
        out[idx] = fundamental_forms(sg.at(idx), F.N[idx]);
    });
    return out;
}

inline double max_conformality_defect(const std::vector<FundamentalForms>& forms)
{
    double d = 0.0;
    for (const auto& f : forms) d = std::max(d, f.conformality_defect);
    return d;
}

inline ResidualReport integrability_residuals(const SurfaceGrid& sg, const FrameField& F)
{
    require_same_grid(sg.grid, F.grid);
    const PolarGrid& g = sg.grid;
    const int n = F.n;

    const auto forms = forms_field(sg, F);
    const TorsionField T = torsion_coefficients(F);

    // grid fields of L, Gamma, T for the finite-difference path
    std::vector<ScalarField> Lf(n * 3, ScalarField(g));      // (s, ij) with ij in {11,12,22}
    std::vector<ScalarField> Gf(2 * 3, ScalarField(g));      // (k, ij)
    std::vector<ScalarField> Tf(n * n * 2, ScalarField(g));  // (s, t, i)
    std::vector<ChristoffelSample> gamma(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        gamma[idx] = christoffel(sg.at(idx));
        for (int s = 0; s < n; ++s) {
            Lf[s * 3 + 0][idx] = forms[idx].L[s](0, 0);
            Lf[s * 3 + 1][idx] = forms[idx].L[s](0, 1);
            Lf[s * 3 + 2][idx] = forms[idx].L[s](1, 1);
        }
        for (int k = 0; k < 2; ++k) {
            Gf[k * 3 + 0][idx] = gamma[idx].G[k][0][0];
            Gf[k * 3 + 1][idx] = gamma[idx].G[k][0][1];
            Gf[k * 3 + 2][idx] = gamma[idx].G[k][1][1];
        }
        for (int s = 0; s < n; ++s)
            for (int t = 0; t < n; ++t) {
                Tf[(s * n + t) * 2 + 0][idx] = T.T1[idx](s, t);
                Tf[(s * n + t) * 2 + 1][idx] = T.T2[idx](s, t);
            }
    }

    auto grad_all = [](const std::vector<ScalarField>& fields) {
        std::vector<std::pair<ScalarField, ScalarField>> out;
        out.reserve(fields.size());
        for (const auto& f : fields) {
            auto [du, dv] = gradient_uv(f);
            out.emplace_back(std::move(du), std::move(dv));
        }
        return out;
    };
    const auto dL = grad_all(Lf);
    const auto dG = grad_all(Gf);
    const auto dT = grad_all(Tf);

    auto L_at = [&](std::size_t idx, int s, int i, int j) { return forms[idx].L[s](i, j); };
    // derivative of L_(s,ij) along direction m (0 = u, 1 = v)
    auto dL_at = [&](std::size_t idx, int s, int i, int j, int m) {
        const int ij = (i == 0 && j == 0) ? 0 : (i == 1 && j == 1 ? 2 : 1);
        const auto& pair = dL[s * 3 + ij];
        return m == 0 ? pair.first[idx] : pair.second[idx];
    };
    auto dG_at = [&](std::size_t idx, int k, int i, int j, int m) {
        const int ij = (i == 0 && j == 0) ? 0 : (i == 1 && j == 1 ? 2 : 1);
        const auto& pair = dG[k * 3 + ij];
        return m == 0 ? pair.first[idx] : pair.second[idx];
    };
    auto dT_at = [&](std::size_t idx, int s, int t, int i, int m) {
        const auto& pair = dT[(s * n + t) * 2 + i];
        return m == 0 ? pair.first[idx] : pair.second[idx];
    };

    ResidualReport rep;
    const double defect = max_conformality_defect(forms);
    rep.mean_curvature_skipped = defect >= 1e-8;

    for (int ring = 0; ring < g.nr; ++ring) {
        for (int spoke = 0; spoke < g.ntheta; ++spoke) {
            const std::size_t idx = g.index(ring, spoke);
            const JetSample& jet = sg.at(idx);
            const auto& f = forms[idx];
            const auto& c = gamma[idx];
            const Eigen::MatrixXd& N = F.N[idx];

            // Gauss: X_ij = sum_k G^k_ij X_k + sum_s L_s,ij N_s
            for (int i = 1; i <= 2; ++i)
                for (int j = i; j <= 2; ++j) {
                    Eigen::VectorXd r = jet.d2(i, j);
                    r -= c.G[0][i - 1][j - 1] * jet.Xu + c.G[1][i - 1][j - 1] * jet.Xv;
                    for (int s = 0; s < n; ++s) r -= f.L[s](i - 1, j - 1) * N.row(s).transpose();
                    rep.gauss_eq = std::max(rep.gauss_eq, r.cwiseAbs().maxCoeff());
                }

            // Weingarten: N_s,i = -sum_jk L_s,ij g^jk X_k + sum_t T_s,i^t N_t
            for (int s = 0; s < n; ++s)
                for (int i = 0; i < 2; ++i) {
                    Eigen::VectorXd r = (i == 0 ? F.Nu[idx] : F.Nv[idx]).row(s).transpose();
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k)
                            r += f.L[s](i, j) * f.g_inv(j, k) *
                                 (k == 0 ? jet.Xu : jet.Xv);
                    const Eigen::MatrixXd& Ti = (i == 0 ? T.T1[idx] : T.T2[idx]);
                    for (int t = 0; t < n; ++t) r -= Ti(s, t) * N.row(t).transpose();
                    rep.weingarten = std::max(rep.weingarten, r.cwiseAbs().maxCoeff());
                }

            // Codazzi-Mainardi:
            // L_s,i1,v + G^1_i1 L_s,12 + G^2_i1 L_s,22 + sum_w L_w,i1 T_w,2^s
            //   = L_s,i2,u + G^1_i2 L_s,11 + G^2_i2 L_s,12 + sum_w L_w,i2 T_w,1^s
            for (int s = 0; s < n; ++s)
                for (int i = 0; i < 2; ++i) {
                    double lhs = dL_at(idx, s, i, 0, 1) + c.G[0][i][0] * L_at(idx, s, 0, 1) +
                                 c.G[1][i][0] * L_at(idx, s, 1, 1);
                    double rhs = dL_at(idx, s, i, 1, 0) + c.G[0][i][1] * L_at(idx, s, 0, 0) +
                                 c.G[1][i][1] * L_at(idx, s, 0, 1);
                    for (int w = 0; w < n; ++w) {
                        lhs += L_at(idx, w, i, 0) * T.T2[idx](w, s);
                        rhs += L_at(idx, w, i, 1) * T.T1[idx](w, s);
                    }
                    rep.codazzi_mainardi = std::max(rep.codazzi_mainardi, std::abs(lhs - rhs));
                }

            // Gauss integrability:
            // G^l_i1,v - G^l_i2,u + sum_m (G^m_i1 G^l_m2 - G^m_i2 G^l_m1)
            //   = sum_(m,s) (L_s,i1 L_s,2m - L_s,i2 L_s,1m) g^ml
            for (int i = 0; i < 2; ++i)
                for (int l = 0; l < 2; ++l) {
                    double lhs = dG_at(idx, l, i, 0, 1) - dG_at(idx, l, i, 1, 0);
                    for (int m = 0; m < 2; ++m)
                        lhs += c.G[m][i][0] * c.G[l][m][1] - c.G[m][i][1] * c.G[l][m][0];
                    double rhs = 0.0;
                    for (int m = 0; m < 2; ++m)
                        for (int s = 0; s < n; ++s)
                            rhs += (L_at(idx, s, i, 0) * L_at(idx, s, 1, m) -
                                    L_at(idx, s, i, 1) * L_at(idx, s, 0, m)) *
                                   f.g_inv(m, l);
                    rep.gauss_integrability =
                        std::max(rep.gauss_integrability, std::abs(lhs - rhs));
                }

            // Ricci:
            // T_s,2,u^w - T_s,1,v^w + sum_t (T_s,2^t T_t,1^w - T_s,1^t T_t,2^w)
            //   = sum_jk (L_s,2j L_w,k1 - L_s,1j L_w,k2) g^jk
            for (int s = 0; s < n; ++s)
                for (int w = s + 1; w < n; ++w) {
                    double lhs = dT_at(idx, s, w, 1, 0) - dT_at(idx, s, w, 0, 1);
                    for (int t = 0; t < n; ++t)
                        lhs += T.T2[idx](s, t) * T.T1[idx](t, w) -
                               T.T1[idx](s, t) * T.T2[idx](t, w);
                    double rhs = 0.0;
                    for (int j = 0; j < 2; ++j)
                        for (int k = 0; k < 2; ++k)
                            rhs += (L_at(idx, s, 1, j) * L_at(idx, w, k, 0) -
                                    L_at(idx, s, 0, j) * L_at(idx, w, k, 1)) *
                                   f.g_inv(j, k);
                    rep.ricci = std::max(rep.ricci, std::abs(lhs - rhs));
                }

            // theorema egregium: Gamma-route R_2112 against K W^2
            const CurvatureScalars cs = curvatures(f);
            rep.egregium =
                std::max(rep.egregium, std::abs(riemann_r2112(jet) - cs.R2112));

            // mean curvature system (conformal only): laplace X = 2 sum H_t W N_t
            if (!rep.mean_curvature_skipped) {
                Eigen::VectorXd r = jet.Xuu + jet.Xvv;
                for (int t = 0; t < n; ++t)
                    r -= 2.0 * cs.H_sigma[t] * f.W * N.row(t).transpose();
                rep.mean_curvature_system =
                    std::max(rep.mean_curvature_system, r.cwiseAbs().maxCoeff());
            }
        }
    }
    return rep;
}

} // namespace nframes
