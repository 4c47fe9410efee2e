#pragma once

// Structured polar discretization of the closed unit disc.
//
// Interior rings sit at half-integer radii r_i = (i+1/2)/nr, i = 0..nr-1,
// so no unknown is placed at the coordinate singularity r = 0.  One extra
// ring of nodes lies exactly on the boundary r = 1.  Angles are uniform,
// theta_j = 2*pi*j/ntheta, and ntheta must be even so that the ray through
// the origin continues onto a grid ray.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nframes {

struct grid_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PolarGrid {
    int nr = 0;
    int ntheta = 0;
    double dr = 0.0;
    double dtheta = 0.0;

    PolarGrid() = default;
    PolarGrid(int nr_, int ntheta_) : nr(nr_), ntheta(ntheta_)
    {
        if (nr < 8) throw grid_error("polar grid needs nr >= 8");
        if (ntheta < 8 || ntheta % 2 != 0)
            throw grid_error("polar grid needs even ntheta >= 8");
        dr = 1.0 / nr;
        dtheta = 2.0 * std::numbers::pi / ntheta;
    }

    bool operator==(const PolarGrid& o) const
    {
        return nr == o.nr && ntheta == o.ntheta;
    }

    // Rings 0..nr-1 are interior, ring nr is the boundary circle r = 1.
    int rings() const { return nr + 1; }
    std::size_t size() const { return static_cast<std::size_t>(rings()) * ntheta; }
    std::size_t interior_size() const { return static_cast<std::size_t>(nr) * ntheta; }

    std::size_t index(int i, int j) const
    {
        j = ((j % ntheta) + ntheta) % ntheta;
        return static_cast<std::size_t>(i) * ntheta + j;
    }
    int ring_of(std::size_t idx) const { return static_cast<int>(idx) / ntheta; }
    int spoke_of(std::size_t idx) const { return static_cast<int>(idx) % ntheta; }
    bool is_boundary(std::size_t idx) const { return ring_of(idx) == nr; }

    double radius(int i) const { return i < nr ? (i + 0.5) * dr : 1.0; }
    double theta(int j) const { return j * dtheta; }
    double u(int i, int j) const { return radius(i) * std::cos(theta(j)); }
    double v(int i, int j) const { return radius(i) * std::sin(theta(j)); }

    // Midpoint cell measure of an interior node; the boundary ring carries
    // no quadrature weight.
    double cell_measure(int i) const { return radius(i) * dr * dtheta; }

    // Node of the same ray continued through the origin.
    int across_origin(int j) const { return (j + ntheta / 2) % ntheta; }
};

template <class T>
struct Field {
    PolarGrid grid;
    std::vector<T> values;

    Field() = default;
    explicit Field(const PolarGrid& g, T init = T{}) : grid(g), values(g.size(), init) {}

    T& operator()(int i, int j) { return values[grid.index(i, j)]; }
    const T& operator()(int i, int j) const { return values[grid.index(i, j)]; }
    T& operator[](std::size_t idx) { return values[idx]; }
    const T& operator[](std::size_t idx) const { return values[idx]; }
    std::size_t size() const { return values.size(); }
};

using ScalarField = Field<double>;
using ComplexField = Field<std::complex<double>>;

inline void require_same_grid(const PolarGrid& a, const PolarGrid& b)
{
    if (!(a == b)) throw grid_error("fields live on different grids");
}

// Midpoint-rule integral over the unit disc, second order for smooth
// integrands; interior nodes only.
inline double quadrature(const ScalarField& f)
{
    const PolarGrid& g = f.grid;
    double sum = 0.0;
    for (int i = 0; i < g.nr; ++i) {
        const double w = g.cell_measure(i);
        double ring = 0.0;
        for (int j = 0; j < g.ntheta; ++j) ring += f(i, j);
        sum += w * ring;
    }
    return sum;
}

// Trapezoidal (= spectral) integral of boundary-ring values over the circle.
inline double boundary_integral(const ScalarField& f)
{
    const PolarGrid& g = f.grid;
    double sum = 0.0;
    for (int j = 0; j < g.ntheta; ++j) sum += f(g.nr, j);
    return sum * g.dtheta;
}

// Measure-weighted mean over the disc (interior nodes).
inline double disc_mean(const ScalarField& f)
{
    return quadrature(f) / std::numbers::pi;
}

// Finite-difference weights on arbitrary 1-d nodes (Fornberg's algorithm,
// reduced to the single-order case used here).
inline std::vector<double> fd_weights(double x0, const std::vector<double>& x, int order)
{
    const int n = static_cast<int>(x.size());
    if (order >= n) throw grid_error("fd_weights: not enough nodes for order");
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

// Radial derivative stencils per ring.  Samples at negative radii are taken
// on the opposite ray (half-integer rings make the continuation smooth).
struct RadialStencil {
    struct Tap {
        int ring;     // absolute ring index of the sample
        bool across;  // sample taken on the opposite ray
        double w;
    };
    std::vector<Tap> taps;
};

namespace detail {

// enforce an exactly vanishing weight sum so constants are annihilated
inline void normalize_zero_sum(RadialStencil& s, int self_ring)
{
    double sum = 0.0;
    for (const auto& t : s.taps) sum += t.w;
    for (auto& t : s.taps)
        if (t.ring == self_ring && !t.across) {
            t.w -= sum;
            return;
        }
    s.taps.push_back({self_ring, false, -sum});
}

// Compact second-order stencils; these coincide with the finite-volume
// solver couplings in the interior.
inline RadialStencil radial_first_compact(const PolarGrid& g, int i)
{
    RadialStencil s;
    const double r = g.radius(i);
    if (i == 0) {
        const auto w = fd_weights(r, {-r, g.radius(1)}, 1);
        s.taps = {{0, true, w[0]}, {1, false, w[1]}};
    } else if (i < g.nr - 1) {
        const auto w = fd_weights(r, {g.radius(i - 1), g.radius(i + 1)}, 1);
        s.taps = {{i - 1, false, w[0]}, {i + 1, false, w[1]}};
    } else if (i == g.nr - 1) {
        const auto w = fd_weights(r, {g.radius(i - 1), r, 1.0}, 1);
        s.taps = {{i - 1, false, w[0]}, {i, false, w[1]}, {g.nr, false, w[2]}};
    } else {
        const auto w = fd_weights(1.0, {1.0, g.radius(g.nr - 1), g.radius(g.nr - 2)}, 1);
        s.taps = {{g.nr, false, w[0]}, {g.nr - 1, false, w[1]}, {g.nr - 2, false, w[2]}};
    }
    normalize_zero_sum(s, i);
    return s;
}

inline RadialStencil radial_second(const PolarGrid& g, int i)
{
    RadialStencil s;
    const double r = g.radius(i);
    if (i == 0) {
        const auto w = fd_weights(r, {-r, r, g.radius(1)}, 2);
        s.taps = {{0, true, w[0]}, {0, false, w[1]}, {1, false, w[2]}};
    } else if (i < g.nr - 1) {
        const auto w = fd_weights(r, {g.radius(i - 1), r, g.radius(i + 1)}, 2);
        s.taps = {{i - 1, false, w[0]}, {i, false, w[1]}, {i + 1, false, w[2]}};
    } else if (i == g.nr - 1) {
        const auto w = fd_weights(r, {g.radius(i - 2), g.radius(i - 1), r, 1.0}, 2);
        s.taps = {{i - 2, false, w[0]}, {i - 1, false, w[1]}, {i, false, w[2]}, {g.nr, false, w[3]}};
    } else {
        const auto w = fd_weights(
            1.0, {1.0, g.radius(g.nr - 1), g.radius(g.nr - 2), g.radius(g.nr - 3)}, 2);
        s.taps = {{g.nr, false, w[0]},
                  {g.nr - 1, false, w[1]},
                  {g.nr - 2, false, w[2]},
                  {g.nr - 3, false, w[3]}};
    }
    normalize_zero_sum(s, i);
    return s;
}

// Wide five-point first-derivative stencil for field derivatives.  The
// torsion and curvature fields have third radial derivatives of size ~1/dr
// near the origin in units of the field scale, so the extra order keeps the
// derivative error well below the O(dr^2) level of the compact stencil.
inline RadialStencil radial_first_wide(const PolarGrid& g, int i)
{
    const int nr = g.nr;
    if (nr < 5) return radial_first_compact(g, i);
    RadialStencil s;
    const double x0 = g.radius(i);
    std::vector<double> x;
    std::vector<std::pair<int, bool>> id; // (ring, across)
    auto add = [&](int ring, bool across) {
        x.push_back(across ? -g.radius(ring) : g.radius(ring));
        id.emplace_back(ring, across);
    };
    if (i == 0) {
        add(1, true);
        add(0, true);
        add(0, false);
        add(1, false);
        add(2, false);
    } else if (i == 1) {
        add(0, true);
        add(0, false);
        add(1, false);
        add(2, false);
        add(3, false);
    } else if (i <= nr - 3) {
        for (int k = i - 2; k <= i + 2; ++k) add(k, false);
    } else {
        for (int k = nr - 4; k <= nr; ++k) add(k, false);
    }
    const auto w = fd_weights(x0, x, 1);
    for (std::size_t k = 0; k < x.size(); ++k) s.taps.push_back({id[k].first, id[k].second, w[k]});
    normalize_zero_sum(s, i);
    return s;
}

template <class T>
T apply_radial(const Field<T>& f, const RadialStencil& s, int j, int j_across)
{
    T acc{};
    for (const auto& t : s.taps) acc += t.w * f(t.ring, t.across ? j_across : j);
    return acc;
}

} // namespace detail

// df/dr at every node (five-point, fourth-order in the interior).
template <class T>
Field<T> d_r(const Field<T>& f)
{
    const PolarGrid& g = f.grid;
    Field<T> out(g);
    for (int i = 0; i <= g.nr; ++i) {
        const RadialStencil s = detail::radial_first_wide(g, i);
        for (int j = 0; j < g.ntheta; ++j)
            out(i, j) = detail::apply_radial(f, s, j, g.across_origin(j));
    }
    return out;
}

// df/dtheta at every node (periodic centered five-point).
template <class T>
Field<T> d_theta(const Field<T>& f)
{
    const PolarGrid& g = f.grid;
    Field<T> out(g);
    const double c1 = 8.0 / (12.0 * g.dtheta), c2 = 1.0 / (12.0 * g.dtheta);
    for (int i = 0; i <= g.nr; ++i)
        for (int j = 0; j < g.ntheta; ++j)
            out(i, j) = c1 * (f(i, j + 1) - f(i, j - 1)) - c2 * (f(i, j + 2) - f(i, j - 2));
    return out;
}

// Cartesian gradient of a node field:
//   f_u = f_r cos(theta) - (f_theta / r) sin(theta)
//   f_v = f_r sin(theta) + (f_theta / r) cos(theta)
template <class T>
std::pair<Field<T>, Field<T>> gradient_uv(const Field<T>& f)
{
    const PolarGrid& g = f.grid;
    Field<T> fu(g), fv(g);
    const Field<T> fr = d_r(f);
    const Field<T> ft = d_theta(f);
    for (int i = 0; i <= g.nr; ++i) {
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta; ++j) {
            const double th = g.theta(j), cs = std::cos(th), sn = std::sin(th);
            const T tangential = ft(i, j) * (1.0 / r);
            fu(i, j) = fr(i, j) * cs - tangential * sn;
            fv(i, j) = fr(i, j) * sn + tangential * cs;
        }
    }
    return {std::move(fu), std::move(fv)};
}

// Five-point polar Laplacian f_rr + f_r/r + f_thth/r^2 applied node-wise.
// Interior rings use the centered stencils above (non-uniform at ring nr-1
// where the boundary node sits at half spacing); boundary nodes carry
// one-sided values.
inline ScalarField laplacian_apply(const ScalarField& f)
{
    const PolarGrid& g = f.grid;
    ScalarField out(g);
    const double invdth2 = 1.0 / (g.dtheta * g.dtheta);
    for (int i = 0; i <= g.nr; ++i) {
        const RadialStencil s1 = detail::radial_first_compact(g, i);
        const RadialStencil s2 = detail::radial_second(g, i);
        const double r = g.radius(i);
        for (int j = 0; j < g.ntheta; ++j) {
            const int ja = g.across_origin(j);
            const double frr = detail::apply_radial(f, s2, j, ja);
            const double fr = detail::apply_radial(f, s1, j, ja);
            const double ftt = (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) * invdth2;
            out(i, j) = frr + fr / r + ftt / (r * r);
        }
    }
    return out;
}

} // namespace nframes
