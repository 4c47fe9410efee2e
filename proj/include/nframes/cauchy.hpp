#pragma once

// Green-kernel integral and the Cauchy/Vekua operators T_B and P_B on the
// polar grid.  Quadrature is the midpoint rule over interior cells; the cell
// containing the evaluation point is skipped for the 1/(zeta-w) kernel (its
// principal part cancels over a symmetric neighborhood) and the adjacent
// cells are refined by subdivision.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nframes/grid.hpp"
#include "nframes/parallel.hpp"

namespace nframes {

namespace detail {

struct HostCell {
    int ring, spoke;
};

inline HostCell host_cell(const PolarGrid& g, std::complex<double> w)
{
    const double r = std::abs(w);
    int i = static_cast<int>(std::floor(r / g.dr));
    i = std::min(std::max(i, 0), g.nr - 1);
    double th = std::arg(w);
    if (th < 0) th += 2.0 * std::numbers::pi;
    int j = static_cast<int>(std::lround(th / g.dtheta)) % g.ntheta;
    return {i, j};
}

inline bool is_neighbor(const PolarGrid& g, HostCell h, int i, int j)
{
    if (std::abs(i - h.ring) > 1) return false;
    const int dj = std::abs(j - h.spoke);
    return std::min(dj, g.ntheta - dj) <= 1;
}

} // namespace detail

// integral over B of |Phi(zeta; w)| with the Green kernel
// Phi = (1/2pi) log |(zeta - w)/(1 - conj(w) zeta)|; the logarithmic
// singularity is integrated analytically over an equal-area disc inside the
// refined host subcell.
inline double green_kernel_abs_integral(const PolarGrid& g, std::complex<double> w)
{
    if (std::abs(w) > 1.0 + 1e-12)
        throw grid_error("green_kernel_abs_integral: point outside the closed disc");
    const double two_pi = 2.0 * std::numbers::pi;
    if (std::abs(w) >= 1.0 - 1e-14) return 0.0; // kernel vanishes on the rim

    const detail::HostCell host = detail::host_cell(g, w);
    double acc = 0.0;

    auto kernel = [&](std::complex<double> z) {
        return std::abs(std::log(std::abs((z - w) / (1.0 - std::conj(w) * z)))) / two_pi;
    };

    for (int i = 0; i < g.nr; ++i) {
        for (int j = 0; j < g.ntheta; ++j) {
            const bool is_host = (i == host.ring && j == host.spoke);
            const bool near = detail::is_neighbor(g, host, i, j);
            const double r = g.radius(i), th = g.theta(j);
            if (!near && !is_host) {
                acc += kernel(std::polar(r, th)) * g.cell_measure(i);
                continue;
            }
            // refine: 16x16 on the host, 4x4 on its neighbors
            const int sub = is_host ? 16 : 4;
            const double ddr = g.dr / sub, ddt = g.dtheta / sub;
            for (int a = 0; a < sub; ++a)
                for (int b = 0; b < sub; ++b) {
                    const double rs = (i * g.dr) + (a + 0.5) * ddr;
                    const double ts = th - 0.5 * g.dtheta + (b + 0.5) * ddt;
                    const double ms = rs * ddr * ddt;
                    const std::complex<double> z = std::polar(rs, ts);
                    const double d = std::abs(z - w);
                    const double rho = std::sqrt(ms / std::numbers::pi); // equal-area disc
                    if (d < rho) {
                        // int over a disc of radius rho of |log|z-w|| / 2pi,
                        // plus the regular factor of the kernel
                        const double sing = -(std::numbers::pi * rho * rho) *
                                            (std::log(rho) - 0.5) / two_pi;
                        const double reg =
                            std::abs(std::log(std::abs(1.0 - std::conj(w) * z))) / two_pi;
                        acc += sing + reg * ms;
                    } else {
                        acc += kernel(z) * ms;
                    }
                }
        }
    }
    return acc;
}

// Cauchy integral operator T_B[f](w) = -(1/pi) int_B f(zeta)/(zeta - w).
inline std::complex<double> cauchy_T(const ComplexField& f, std::complex<double> w)
{
    const PolarGrid& g = f.grid;
    if (std::abs(w) > 1.0 - g.dr + 1e-14)
        throw grid_error("cauchy_T: evaluation point too close to the boundary ring");

    const detail::HostCell host = detail::host_cell(g, w);
    std::complex<double> acc = 0.0;
    for (int i = 0; i < g.nr; ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta; ++j) {
            const bool is_host = (i == host.ring && j == host.spoke);
            const std::complex<double> fc = f(i, j);
            if (is_host || detail::is_neighbor(g, host, i, j)) {
                // refined midpoint sum; only the subcell containing w is
                // skipped (principal part cancels over it), which keeps
                // T_B smooth under small movements of w
                const int sub = is_host ? 16 : 4;
                const double ddr = g.dr / sub, ddt = g.dtheta / sub;
                for (int a = 0; a < sub; ++a)
                    for (int b = 0; b < sub; ++b) {
                        const double rs = (i * g.dr) + (a + 0.5) * ddr;
                        const double ts = g.theta(j) - 0.5 * g.dtheta + (b + 0.5) * ddt;
                        const std::complex<double> z = std::polar(rs, ts);
                        const double ms = rs * ddr * ddt;
                        if (std::norm(z - w) < ms / std::numbers::pi) continue;
                        acc += fc / (z - w) * ms;
                    }
            } else {
                const std::complex<double> z = std::polar(r, g.theta(j));
                acc += fc / (z - w) * g.cell_measure(i);
            }
        }
    }
    return -acc / std::numbers::pi;
}

// Modified Vekua operator
//   P_B[f](w) = -(1/pi) int_B { f/(zeta-w) + conj(zeta) conj(f)/(1 - w conj(zeta)) }.
// The second kernel is regular inside the disc.
inline std::complex<double> cauchy_P(const ComplexField& f, std::complex<double> w)
{
    const PolarGrid& g = f.grid;
    std::complex<double> reg = 0.0;
    for (int i = 0; i < g.nr; ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta; ++j) {
            const std::complex<double> z = std::polar(r, g.theta(j));
            reg += std::conj(z) * std::conj(f(i, j)) / (1.0 - w * std::conj(z)) *
                   g.cell_measure(i);
        }
    }
    return cauchy_T(f, w) - reg / std::numbers::pi;
}

} // namespace nframes
