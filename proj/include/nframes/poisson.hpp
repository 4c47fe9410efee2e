#pragma once

// Neumann and zero-Dirichlet Poisson solvers on the polar grid.
//
// Both solvers are matrix-free conjugate-gradient iterations on the
// measure-weighted finite-volume Laplacian, which is symmetric by
// construction: the entry coupling two cells equals (interface length) /
// (node distance) seen from either side.  The Neumann problem keeps the
// boundary ring as unknowns and feeds the prescribed flux into the
// right-hand side; its constant null mode is projected out each iteration.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nframes/grid.hpp"

namespace nframes {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct compat_error : std::runtime_error {
    double defect;
    compat_error(const std::string& msg, double d) : std::runtime_error(msg), defect(d) {}
};

struct LinearSolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
    std::string constraint = "none"; // "mean-zero" | "none"
};

inline int default_max_iterations(std::size_t unknowns)
{
    return static_cast<int>(200.0 * std::sqrt(static_cast<double>(unknowns))) + 50;
}

namespace detail {

// Conjugate gradients on a symmetric positive (semi)definite operator.
// `project` removes the null-space component (no-op for definite systems).
inline LinearSolveStats cg(const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply,
                           const std::vector<double>& b, std::vector<double>& x, double tol,
                           int max_iter,
                           const std::function<void(std::vector<double>&)>& project = {})
{
    const std::size_t n = b.size();
    std::vector<double> r = b, p(n), ap(n);
    x.assign(n, 0.0);
    if (project) project(r);

    auto dot = [](const std::vector<double>& a, const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * c[i];
        return s;
    };

    const double bnorm = std::sqrt(dot(r, r));
    LinearSolveStats stats;
    if (bnorm == 0.0) return stats;

    p = r;
    double rr = dot(r, r);
    for (int it = 0; it < max_iter; ++it) {
        apply(p, ap);
        if (project) project(ap);
        const double alpha = rr / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if (project && (it % 32 == 31)) project(r);
        const double rr_new = dot(r, r);
        stats.iterations = it + 1;
        stats.rel_residual = std::sqrt(rr_new) / bnorm;
        if (stats.rel_residual <= tol) return stats;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    throw solver_error("cg: no convergence after " + std::to_string(max_iter) +
                       " iterations (relative residual " + std::to_string(stats.rel_residual) + ")");
}

// Finite-volume face data for the Neumann layout.  The outermost interior
// cell is shrunk to [1-dr, 1-dr/4] and the boundary ring owns [1-dr/4, 1],
// so every node is the (approximate) center of its cell.
struct NeumannFV {
    PolarGrid g;
    std::vector<double> measure;     // per ring
    std::vector<double> a_rad;       // face between ring i and i+1, i = 0..nr-1
    std::vector<double> a_ang;       // angular face coefficient per ring

    explicit NeumannFV(const PolarGrid& grid) : g(grid)
    {
        const int nr = g.nr;
        const double dr = g.dr, dth = g.dtheta;
        measure.resize(nr + 1);
        a_rad.resize(nr);
        a_ang.resize(nr + 1);
        for (int i = 0; i <= nr; ++i) {
            double r_in, r_out;
            if (i < nr - 1) {
                r_in = i * dr;
                r_out = (i + 1) * dr;
            } else if (i == nr - 1) {
                r_in = 1.0 - dr;
                r_out = 1.0 - 0.25 * dr;
            } else {
                r_in = 1.0 - 0.25 * dr;
                r_out = 1.0;
            }
            measure[i] = 0.5 * (r_out * r_out - r_in * r_in) * dth;
            a_ang[i] = (r_out - r_in) / (g.radius(i) * dth);
        }
        for (int i = 0; i < nr; ++i) {
            const double r_face = (i < nr - 1) ? (i + 1) * dr : 1.0 - 0.25 * dr;
            const double dist = g.radius(i + 1) - g.radius(i);
            a_rad[i] = r_face * dth / dist;
        }
    }

    // y = A x with A the weighted negative Laplacian (graph-Laplacian form).
    void apply(const std::vector<double>& x, std::vector<double>& y) const
    {
        const int nr = g.nr, nt = g.ntheta;
        y.assign(x.size(), 0.0);
        for (int i = 0; i <= nr; ++i) {
            const double aa = a_ang[i];
            for (int j = 0; j < nt; ++j) {
                const std::size_t p = g.index(i, j);
                double acc = aa * (2.0 * x[p] - x[g.index(i, j + 1)] - x[g.index(i, j - 1)]);
                if (i < nr) acc += a_rad[i] * (x[p] - x[g.index(i + 1, j)]);
                if (i > 0) acc += a_rad[i - 1] * (x[p] - x[g.index(i - 1, j)]);
                y[p] = acc;
            }
        }
    }
};

} // namespace detail

// Solve the weak-form Neumann system  A phi = rhs  (A as in NeumannFV) with
// the compatibility component removed; result has zero disc mean.
inline std::pair<ScalarField, LinearSolveStats>
neumann_solve_weak(const PolarGrid& g, std::vector<double> rhs, double tol,
                   int max_iter = -1)
{
    if (tol <= 0.0) throw solver_error("tolerance must be positive");
    const detail::NeumannFV fv(g);
    const std::size_t n = g.size();
    if (max_iter < 0) max_iter = default_max_iterations(n);

    auto project = [n](std::vector<double>& x) {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(n);
        for (double& v : x) v -= mean;
    };
    project(rhs);

    std::vector<double> x;
    auto stats = detail::cg([&fv](const std::vector<double>& in,
                                  std::vector<double>& out) { fv.apply(in, out); },
                            rhs, x, tol, max_iter, project);
    stats.constraint = "mean-zero";

    ScalarField phi(g);
    phi.values = std::move(x);
    const double mean = disc_mean(phi);
    for (double& v : phi.values) v -= mean;
    return {std::move(phi), stats};
}

// Neumann problem  laplace(phi) = f in B,  dphi/dnu = gb on r = 1.
// Requires the compatibility condition  int_B f = int_{dB} gb  up to
// `compat_tol` (defaults to 1e-6 * (1 + sup|f|)).
inline std::pair<ScalarField, LinearSolveStats>
solve_neumann(const ScalarField& f, const std::vector<double>& gb, double tol,
              double compat_tol = -1.0)
{
    const PolarGrid& g = f.grid;
    if (static_cast<int>(gb.size()) != g.ntheta)
        throw solver_error("boundary data size mismatch");

    double fsup = 0.0;
    for (double v : f.values) fsup = std::max(fsup, std::abs(v));
    if (compat_tol < 0.0) compat_tol = 1e-6 * (1.0 + fsup);

    double gsum = 0.0;
    for (double v : gb) gsum += v;
    const double defect = quadrature(f) - gsum * g.dtheta;
    if (std::abs(defect) > compat_tol)
        throw compat_error("neumann compatibility defect " + std::to_string(defect) +
                               " exceeds tolerance " + std::to_string(compat_tol),
                           defect);

    const detail::NeumannFV fv(g);
    std::vector<double> rhs(g.size(), 0.0);
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j)
            rhs[g.index(i, j)] = -fv.measure[i] * f(i, j);
    for (int j = 0; j < g.ntheta; ++j) rhs[g.index(g.nr, j)] += g.dtheta * gb[j];

    return neumann_solve_weak(g, std::move(rhs), tol);
}

// Dirichlet problem  laplace(phi) = f in B,  phi = 0 on r = 1.
inline std::pair<ScalarField, LinearSolveStats>
solve_dirichlet_zero(const ScalarField& f, double tol)
{
    if (tol <= 0.0) throw solver_error("tolerance must be positive");
    const PolarGrid& g = f.grid;
    const int nr = g.nr, nt = g.ntheta;
    const double dr = g.dr, dth = g.dtheta;
    const std::size_t n = g.interior_size();

    std::vector<double> a_rad(nr); // face between ring i and i+1; i = nr-1 is the wall
    for (int i = 0; i < nr - 1; ++i) a_rad[i] = (i + 1) * dr * dth / dr;
    a_rad[nr - 1] = 1.0 * dth / (0.5 * dr);
    std::vector<double> a_ang(nr);
    for (int i = 0; i < nr; ++i) a_ang[i] = dr / (g.radius(i) * dth);

    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        y.assign(n, 0.0);
        for (int i = 0; i < nr; ++i) {
            for (int j = 0; j < nt; ++j) {
                const std::size_t p = g.index(i, j);
                double acc = a_ang[i] * (2.0 * x[p] - x[g.index(i, j + 1)] - x[g.index(i, j - 1)]);
                if (i < nr - 1)
                    acc += a_rad[i] * (x[p] - x[g.index(i + 1, j)]);
                else
                    acc += a_rad[i] * x[p]; // homogeneous wall value
                if (i > 0) acc += a_rad[i - 1] * (x[p] - x[g.index(i - 1, j)]);
                y[p] = acc;
            }
        }
    };

    std::vector<double> rhs(n);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j)
            rhs[g.index(i, j)] = -g.cell_measure(i) * f(i, j);

    std::vector<double> x;
    auto stats = detail::cg(apply, rhs, x, tol, default_max_iterations(n));

    ScalarField phi(g);
    for (std::size_t p = 0; p < n; ++p) phi.values[p] = x[p];
    // boundary ring keeps the Dirichlet value 0
    return {std::move(phi), stats};
}

// Value at the coordinate origin: average of the innermost ring.
inline double origin_value(const ScalarField& f)
{
    double s = 0.0;
    for (int j = 0; j < f.grid.ntheta; ++j) s += f(0, j);
    return s / f.grid.ntheta;
}

} // namespace nframes
