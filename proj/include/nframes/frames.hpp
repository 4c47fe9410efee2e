#pragma once

// Orthonormal oriented frames in the normal bundle, torsion coefficients,
// SO(n) rotation fields with their transformation laws, the exterior
// product, and the curvature quantities of the normal bundle.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nframes/geometry.hpp"
#include "nframes/grid.hpp"
#include "nframes/parallel.hpp"
#include "nframes/surfaces.hpp"

namespace nframes {

struct frame_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct gauge_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DerivPath { analytic, fd };

// Immersion jets cached on a polar grid.
struct SurfaceGrid {
    ImmersionSpec spec;
    PolarGrid grid;
    std::vector<JetSample> jets; // one per node, boundary ring included

    const JetSample& at(std::size_t idx) const { return jets[idx]; }
    const JetSample& at(int i, int j) const { return jets[grid.index(i, j)]; }
};

inline SurfaceGrid make_surface_grid(const ImmersionSpec& spec, const PolarGrid& grid)
{
    SurfaceGrid s{spec, grid, std::vector<JetSample>(grid.size())};
    parallel_for(0, grid.size(), [&](std::size_t idx) {
        const int i = grid.ring_of(idx), j = grid.spoke_of(idx);
        s.jets[idx] = evaluate_jet(spec, grid.u(i, j), grid.v(i, j));
    });
    return s;
}

// Per-node orthonormal oriented basis of the normal space, rows N_1..N_n,
// with first-derivative access.
struct FrameField {
    PolarGrid grid;
    int n = 0;        // codimension
    int ambient = 0;  // n + 2
    DerivPath path = DerivPath::analytic;
    std::vector<Eigen::MatrixXd> N, Nu, Nv; // n x ambient per node
};

// Skew torsion matrices T_1, T_2 per node; entry (s,t) is T_{s,i}^t.
struct TorsionField {
    PolarGrid grid;
    int n = 0;
    DerivPath path = DerivPath::analytic;
    std::vector<Eigen::MatrixXd> T1, T2;
};

// SO(n)-valued rotation field with derivative access.
struct RotationField {
    PolarGrid grid;
    int n = 0;
    DerivPath path = DerivPath::analytic;
    std::vector<Eigen::MatrixXd> R, Ru, Rv;
};

namespace detail {

// First-order jet scalars/vectors used to run Gram-Schmidt with exact
// derivative propagation.
struct S1 {
    double v = 0.0, du = 0.0, dv = 0.0;
};
inline S1 operator+(S1 a, S1 b) { return {a.v + b.v, a.du + b.du, a.dv + b.dv}; }
inline S1 operator-(S1 a, S1 b) { return {a.v - b.v, a.du - b.du, a.dv - b.dv}; }
inline S1 operator*(S1 a, S1 b)
{
    return {a.v * b.v, a.du * b.v + a.v * b.du, a.dv * b.v + a.v * b.dv};
}
inline S1 operator/(S1 a, S1 b)
{
    const double iv = 1.0 / b.v;
    return {a.v * iv, (a.du - a.v * iv * b.du) * iv, (a.dv - a.v * iv * b.dv) * iv};
}
inline S1 sqrt(S1 a)
{
    const double r = std::sqrt(a.v);
    return {r, 0.5 * a.du / r, 0.5 * a.dv / r};
}

struct V1 {
    Eigen::VectorXd x, du, dv;
};
inline S1 dot(const V1& a, const V1& b)
{
    return {a.x.dot(b.x), a.du.dot(b.x) + a.x.dot(b.du), a.dv.dot(b.x) + a.x.dot(b.dv)};
}
inline V1 operator-(const V1& a, const V1& b) { return {a.x - b.x, a.du - b.du, a.dv - b.dv}; }
inline V1 operator*(const S1& s, const V1& a)
{
    return {s.v * a.x, s.du * a.x + s.v * a.du, s.dv * a.x + s.v * a.dv};
}

inline V1 from_jets(const std::vector<Jet3>& comps)
{
    const int m = static_cast<int>(comps.size());
    V1 out{Eigen::VectorXd(m), Eigen::VectorXd(m), Eigen::VectorXd(m)};
    for (int k = 0; k < m; ++k) {
        out.x[k] = comps[k].value();
        out.du[k] = comps[k].du();
        out.dv[k] = comps[k].dv();
    }
    return out;
}

// Seed vectors spanning the normal space at one node, with derivatives.
inline std::vector<V1> normal_seeds(const SurfaceGrid& sg, std::size_t idx)
{
    const ImmersionSpec& spec = sg.spec;
    const JetSample& jet = sg.at(idx);
    const int n = spec.codimension, m = spec.ambient_dim();

    if (spec.seed_kind == SeedKind::closed_form) {
        const int i = sg.grid.ring_of(idx), j = sg.grid.spoke_of(idx);
        auto raw = spec.seeds(sg.grid.u(i, j), sg.grid.v(i, j));
        std::vector<V1> out;
        out.reserve(raw.size());
        for (const auto& r : raw) out.push_back(from_jets(r));
        return out;
    }

    if (spec.seed_kind == SeedKind::graph_euler) {
        // N_s ~ (-z_s,u, -z_s,v, 0,...,1,...,0); graph charts have X = (u, v, z)
        std::vector<V1> out(n);
        for (int s = 0; s < n; ++s) {
            V1 w{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m)};
            const int c = 2 + s;
            w.x[0] = -jet.Xu[c];
            w.x[1] = -jet.Xv[c];
            w.x[c] = 1.0;
            w.du[0] = -jet.Xuu[c];
            w.du[1] = -jet.Xuv[c];
            w.dv[0] = -jet.Xuv[c];
            w.dv[1] = -jet.Xvv[c];
            out[s] = std::move(w);
        }
        return out;
    }

    // generic: project the ambient basis vectors e_3..e_(n+2) off the
    // tangent plane, with exact derivatives through the inverse metric
    const V1 xu{jet.Xu, jet.Xuu, jet.Xuv};
    const V1 xv{jet.Xv, jet.Xuv, jet.Xvv};
    const S1 g11 = dot(xu, xu), g12 = dot(xu, xv), g22 = dot(xv, xv);
    const S1 det = g11 * g22 - g12 * g12;
    const S1 i11 = g22 / det, i22 = g11 / det;
    const S1 i12 = S1{-g12.v, -g12.du, -g12.dv} / det;

    std::vector<V1> out(n);
    for (int s = 0; s < n; ++s) {
        V1 e{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m)};
        e.x[2 + s] = 1.0;
        const S1 a = dot(e, xu), b = dot(e, xv);
        const S1 c1 = i11 * a + i12 * b; // tangential components of e
        const S1 c2 = i12 * a + i22 * b;
        out[s] = e - (c1 * xu) - (c2 * xv);
    }
    return out;
}

inline double oriented_det(const JetSample& jet, const Eigen::MatrixXd& N)
{
    const int m = jet.ambient_dim();
    Eigen::MatrixXd M(m, m);
    M.row(0) = jet.Xu;
    M.row(1) = jet.Xv;
    for (int s = 0; s < N.rows(); ++s) M.row(2 + s) = N.row(s);
    return M.determinant();
}

} // namespace detail

// Orthonormal oriented frame from the surface's seed vectors via
// Gram-Schmidt (fixed order, no re-pivoting); derivatives propagate
// analytically through the orthogonalization.
inline FrameField euler_gram_schmidt_frame(const SurfaceGrid& sg)
{
    const PolarGrid& g = sg.grid;
    const int n = sg.spec.codimension, m = sg.spec.ambient_dim();
    FrameField F;
    F.grid = g;
    F.n = n;
    F.ambient = m;
    F.path = DerivPath::analytic;
    F.N.assign(g.size(), Eigen::MatrixXd(n, m));
    F.Nu.assign(g.size(), Eigen::MatrixXd(n, m));
    F.Nv.assign(g.size(), Eigen::MatrixXd(n, m));

    parallel_for(0, g.size(), [&](std::size_t idx) {
        auto seeds = detail::normal_seeds(sg, idx);
        std::vector<detail::V1> basis;
        basis.reserve(n);
        for (int s = 0; s < n; ++s) {
            detail::V1 w = seeds[s];
            for (const auto& prev : basis) w = w - (detail::dot(w, prev) * prev);
            const detail::S1 nn = detail::dot(w, w);
            if (!(nn.v > 1e-16)) {
                const int i = g.ring_of(idx), j = g.spoke_of(idx);
                throw frame_error("frame construction: near-degenerate seed " +
                                  std::to_string(s) + " at node (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
            }
            const detail::S1 inv = detail::S1{1.0, 0.0, 0.0} / detail::sqrt(nn);
            basis.push_back(inv * w);
        }
        for (int s = 0; s < n; ++s) {
            F.N[idx].row(s) = basis[s].x;
            F.Nu[idx].row(s) = basis[s].du;
            F.Nv[idx].row(s) = basis[s].dv;
        }
        // orientation det(Xu, Xv, N_1..N_n) > 0; flip the last normal if needed
        const double det = detail::oriented_det(sg.at(idx), F.N[idx]);
        if (det < 0.0) {
            F.N[idx].row(n - 1) *= -1.0;
            F.Nu[idx].row(n - 1) *= -1.0;
            F.Nv[idx].row(n - 1) *= -1.0;
        } else if (det == 0.0) {
            throw frame_error("frame construction: degenerate moving frame");
        }
    });
    return F;
}

// Replace the stored frame derivatives by centered grid differences
// (one-sided at r = 1).  Used after constructions without analytic
// derivative access.
inline void refresh_derivatives_fd(FrameField& F)
{
    const PolarGrid& g = F.grid;
    for (int s = 0; s < F.n; ++s)
        for (int c = 0; c < F.ambient; ++c) {
            ScalarField comp(g);
            for (std::size_t idx = 0; idx < g.size(); ++idx) comp[idx] = F.N[idx](s, c);
            const auto [cu, cv] = gradient_uv(comp);
            for (std::size_t idx = 0; idx < g.size(); ++idx) {
                F.Nu[idx](s, c) = cu[idx];
                F.Nv[idx](s, c) = cv[idx];
            }
        }
    F.path = DerivPath::fd;
}

// T_(s,i)^t = N_s,u^i . N_t, stored skew.
inline TorsionField torsion_coefficients(const FrameField& F)
{
    TorsionField T;
    T.grid = F.grid;
    T.n = F.n;
    T.path = F.path;
    T.T1.resize(F.N.size());
    T.T2.resize(F.N.size());
    parallel_for(0, F.N.size(), [&](std::size_t idx) {
        const Eigen::MatrixXd A1 = F.Nu[idx] * F.N[idx].transpose();
        const Eigen::MatrixXd A2 = F.Nv[idx] * F.N[idx].transpose();
        T.T1[idx] = 0.5 * (A1 - A1.transpose());
        T.T2[idx] = 0.5 * (A2 - A2.transpose());
    });
    return T;
}

inline void check_rotation(const Eigen::MatrixXd& R)
{
    const int n = static_cast<int>(R.rows());
    const double defect = (R * R.transpose() - Eigen::MatrixXd::Identity(n, n)).norm();
    if (defect > 1e-12 * n) throw gauge_error("rotation field is not orthogonal");
    if (R.determinant() < 0.0) throw gauge_error("rotation field is not orientation-preserving");
}

// N~_s = sum_t R_s^t N_t with derivative composition.
inline FrameField rotate_frame(const FrameField& F, const RotationField& rot)
{
    require_same_grid(F.grid, rot.grid);
    if (rot.n != F.n) throw gauge_error("rotation dimension mismatch");
    FrameField out = F;
    out.path = (F.path == DerivPath::analytic && rot.path == DerivPath::analytic)
                   ? DerivPath::analytic
                   : DerivPath::fd;
    parallel_for(0, F.N.size(), [&](std::size_t idx) {
        check_rotation(rot.R[idx]);
        out.N[idx] = rot.R[idx] * F.N[idx];
        out.Nu[idx] = rot.Ru[idx] * F.N[idx] + rot.R[idx] * F.Nu[idx];
        out.Nv[idx] = rot.Rv[idx] * F.N[idx] + rot.R[idx] * F.Nv[idx];
    });
    return out;
}

// T~_i = R_u^i R^t + R T_i R^t (skew enforced).
inline TorsionField transform_torsions(const TorsionField& T, const RotationField& rot)
{
    require_same_grid(T.grid, rot.grid);
    if (rot.n != T.n) throw gauge_error("rotation dimension mismatch");
    TorsionField out = T;
    out.path = (T.path == DerivPath::analytic && rot.path == DerivPath::analytic)
                   ? DerivPath::analytic
                   : DerivPath::fd;
    parallel_for(0, T.T1.size(), [&](std::size_t idx) {
        const Eigen::MatrixXd& R = rot.R[idx];
        const Eigen::MatrixXd A1 = rot.Ru[idx] * R.transpose() + R * T.T1[idx] * R.transpose();
        const Eigen::MatrixXd A2 = rot.Rv[idx] * R.transpose() + R * T.T2[idx] * R.transpose();
        out.T1[idx] = 0.5 * (A1 - A1.transpose());
        out.T2[idx] = 0.5 * (A2 - A2.transpose());
    });
    return out;
}

// ------------------------------------------------------------ rotations

// exp on so(n): scaling and squaring with a degree-8 truncated series,
// followed by a polar projection so the result is orthogonal to rounding.
inline Eigen::MatrixXd expm_skew(const Eigen::MatrixXd& A)
{
    const int n = static_cast<int>(A.rows());
    const double norm = A.norm();
    int squarings = 0;
    Eigen::MatrixXd B = A;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        B /= std::pow(2.0, squarings);
    }
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 8; ++k) {
        term = (term * B) / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sum, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

inline RotationField identity_rotation(const PolarGrid& g, int n)
{
    RotationField rot;
    rot.grid = g;
    rot.n = n;
    rot.path = DerivPath::analytic;
    rot.R.assign(g.size(), Eigen::MatrixXd::Identity(n, n));
    rot.Ru.assign(g.size(), Eigen::MatrixXd::Zero(n, n));
    rot.Rv.assign(g.size(), Eigen::MatrixXd::Zero(n, n));
    return rot;
}

// SO(2) rotation by a scalar angle field given with analytic gradient:
//   N~_1 = cos(phi) N_1 + sin(phi) N_2,  N~_2 = -sin(phi) N_1 + cos(phi) N_2
template <class Angle, class AngleU, class AngleV>
RotationField so2_rotation(const PolarGrid& g, Angle phi, AngleU phi_u, AngleV phi_v)
{
    RotationField rot;
    rot.grid = g;
    rot.n = 2;
    rot.path = DerivPath::analytic;
    rot.R.resize(g.size());
    rot.Ru.resize(g.size());
    rot.Rv.resize(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const int i = g.ring_of(idx), j = g.spoke_of(idx);
        const double u = g.u(i, j), v = g.v(i, j);
        const double c = std::cos(phi(u, v)), s = std::sin(phi(u, v));
        Eigen::Matrix2d R, D;
        R << c, s, -s, c;
        D << -s, c, -c, -s;
        rot.R[idx] = R;
        rot.Ru[idx] = phi_u(u, v) * D;
        rot.Rv[idx] = phi_v(u, v) * D;
    }
    return rot;
}

// SO(2) rotation from a grid angle field; derivatives by grid differences.
inline RotationField so2_rotation_from_field(const ScalarField& phi)
{
    const PolarGrid& g = phi.grid;
    const auto [pu, pv] = gradient_uv(phi);
    RotationField rot;
    rot.grid = g;
    rot.n = 2;
    rot.path = DerivPath::fd;
    rot.R.resize(g.size());
    rot.Ru.resize(g.size());
    rot.Rv.resize(g.size());
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const double c = std::cos(phi[idx]), s = std::sin(phi[idx]);
        Eigen::Matrix2d R, D;
        R << c, s, -s, c;
        D << -s, c, -c, -s;
        rot.R[idx] = R;
        rot.Ru[idx] = pu[idx] * D;
        rot.Rv[idx] = pv[idx] * D;
    }
    return rot;
}

// Smooth random SO(n) field: product of plane rotations whose angles are
// random quadratic polynomials in (u,v); derivatives by the product rule,
// so the field has analytic derivative access.
inline RotationField random_rotation_field(const PolarGrid& g, int n, std::uint64_t seed,
                                           double amplitude = 0.5)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coeff(-amplitude, amplitude);

    struct Plane {
        int p, q;
        double c[6]; // 1, u, v, u^2, uv, v^2
    };
    std::vector<Plane> planes;
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            Plane pl{p, q, {}};
            for (double& c : pl.c) c = coeff(rng);
            planes.push_back(pl);
        }

    RotationField rot;
    rot.grid = g;
    rot.n = n;
    rot.path = DerivPath::analytic;
    rot.R.resize(g.size());
    rot.Ru.resize(g.size());
    rot.Rv.resize(g.size());

    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const int i = g.ring_of(idx), j = g.spoke_of(idx);
        const double u = g.u(i, j), v = g.v(i, j);
        Eigen::MatrixXd R = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd Ru = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd Rv = Eigen::MatrixXd::Zero(n, n);
        for (const auto& pl : planes) {
            const double a = pl.c[0] + pl.c[1] * u + pl.c[2] * v + pl.c[3] * u * u +
                             pl.c[4] * u * v + pl.c[5] * v * v;
            const double au = pl.c[1] + 2 * pl.c[3] * u + pl.c[4] * v;
            const double av = pl.c[2] + pl.c[4] * u + 2 * pl.c[5] * v;
            Eigen::MatrixXd G = Eigen::MatrixXd::Identity(n, n);
            Eigen::MatrixXd Gd = Eigen::MatrixXd::Zero(n, n);
            const double c = std::cos(a), s = std::sin(a);
            G(pl.p, pl.p) = c;
            G(pl.p, pl.q) = s;
            G(pl.q, pl.p) = -s;
            G(pl.q, pl.q) = c;
            Gd(pl.p, pl.p) = -s;
            Gd(pl.p, pl.q) = c;
            Gd(pl.q, pl.p) = -c;
            Gd(pl.q, pl.q) = -s;
            Ru = Ru * G + R * (au * Gd);
            Rv = Rv * G + R * (av * Gd);
            R = R * G;
        }
        rot.R[idx] = std::move(R);
        rot.Ru[idx] = std::move(Ru);
        rot.Rv[idx] = std::move(Rv);
    }
    return rot;
}

// ------------------------------------------------------- exterior product

// Components (x^i y^j - x^j y^i), 1 <= i < j <= m, in lexicographic order.
inline Eigen::VectorXd wedge(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    const int m = static_cast<int>(x.size());
    if (y.size() != m) throw std::invalid_argument("wedge: dimension mismatch");
    if (m < 2) throw std::invalid_argument("wedge: needs dimension >= 2");
    Eigen::VectorXd out(m * (m - 1) / 2);
    int k = 0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) out[k++] = x[i] * y[j] - x[j] * y[i];
    return out;
}

// ------------------------------------------------- normal bundle curvature

struct NormalCurvature {
    Eigen::MatrixXd S12;              // entries S_(s,12)^t, skew
    double S_N = 0.0;                 // S_(1,12)^2 / W, defined for n = 2
    Eigen::VectorXd curvature_vector; // components S_(s,12)^t / W, s < t, lex order
    double magnitude = 0.0;
};

namespace detail {

// Chart-covariant L-route: S_(s,12)^w = sum_(m,p) (L_s,1m L_w,2p - L_s,2m L_w,1p) g^mp.
// Reduces to the conformal formula
//   S = ((L_s,11 - L_s,22) L_w,12 - (L_w,11 - L_w,22) L_s,12)/W
// when g = W id.
inline NormalCurvature normal_curvature_impl(const FundamentalForms& f)
{
    const int n = static_cast<int>(f.L.size());
    NormalCurvature nc;
    nc.S12 = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t) {
            const double val =
                (f.L[s].row(0) * f.g_inv * f.L[t].row(1).transpose()).value() -
                (f.L[s].row(1) * f.g_inv * f.L[t].row(0).transpose()).value();
            nc.S12(s, t) = val;
            nc.S12(t, s) = -val;
        }
    nc.curvature_vector.resize(n * (n - 1) / 2);
    int k = 0;
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t) nc.curvature_vector[k++] = nc.S12(s, t) / f.W;
    nc.magnitude = nc.curvature_vector.norm();
    if (n == 2) nc.S_N = nc.S12(0, 1) / f.W;
    return nc;
}

} // namespace detail

// L-route normal curvature; requires conformal parameters per the
// derivation of the closed formula.
inline NormalCurvature normal_curvature(const FundamentalForms& f)
{
    if (f.conformality_defect >= 1e-8)
        throw geometry_error("normal_curvature: non-conformal parametrization; "
                             "use the torsion route for residual checks");
    return detail::normal_curvature_impl(f);
}

// Chart-covariant variant used for curvature-inequality sweeps on
// non-conformal charts.
inline NormalCurvature normal_curvature_general(const FundamentalForms& f)
{
    return detail::normal_curvature_impl(f);
}

// Torsion route: S_12 = d_v T_1 - d_u T_2 + [T_1, T_2] per node.
// Parametrization-dependent; exposed for the Ricci agreement check.
inline std::vector<Eigen::MatrixXd> normal_curvature_torsion_route(const TorsionField& T)
{
    const PolarGrid& g = T.grid;
    const int n = T.n;
    std::vector<Eigen::MatrixXd> out(g.size(), Eigen::MatrixXd::Zero(n, n));
    for (int s = 0; s < n; ++s)
        for (int t = s + 1; t < n; ++t) {
            ScalarField t1(g), t2(g);
            for (std::size_t idx = 0; idx < g.size(); ++idx) {
                t1[idx] = T.T1[idx](s, t);
                t2[idx] = T.T2[idx](s, t);
            }
            const auto [t1u, t1v] = gradient_uv(t1);
            const auto [t2u, t2v] = gradient_uv(t2);
            for (std::size_t idx = 0; idx < g.size(); ++idx) {
                out[idx](s, t) = t1v[idx] - t2u[idx];
                out[idx](t, s) = -out[idx](s, t);
            }
        }
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        const Eigen::MatrixXd comm = T.T1[idx] * T.T2[idx] - T.T2[idx] * T.T1[idx];
        out[idx] += comm;
    }
    return out;
}

} // namespace nframes
