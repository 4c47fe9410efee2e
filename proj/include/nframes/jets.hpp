#pragma once

// Truncated third-order Taylor arithmetic in two variables (u,v).
// A Jet3 carries the value of a scalar function together with all partial
// derivatives up to order three at one parameter point.  Surface evaluators
// are written in this arithmetic, which makes every catalog jet exact to
// rounding and keeps mixed partials symmetric by construction.

#include <array>
#include <cmath>
#include <stdexcept>

namespace nframes {

struct Jet3 {
    // f, fu, fv, fuu, fuv, fvv, fuuu, fuuv, fuvv, fvvv
    std::array<double, 10> c{};

    Jet3() = default;
    explicit Jet3(double value) { c[0] = value; }

    static Jet3 constant(double value) { return Jet3(value); }
    static Jet3 var_u(double u0)
    {
        Jet3 j(u0);
        j.c[1] = 1.0;
        return j;
    }
    static Jet3 var_v(double v0)
    {
        Jet3 j(v0);
        j.c[2] = 1.0;
        return j;
    }

    double value() const { return c[0]; }
    double du() const { return c[1]; }
    double dv() const { return c[2]; }
    double duu() const { return c[3]; }
    double duv() const { return c[4]; }
    double dvv() const { return c[5]; }
    double duuu() const { return c[6]; }
    double duuv() const { return c[7]; }
    double duvv() const { return c[8]; }
    double dvvv() const { return c[9]; }

    Jet3& operator+=(const Jet3& o)
    {
        for (int i = 0; i < 10; ++i) c[i] += o.c[i];
        return *this;
    }
    Jet3& operator-=(const Jet3& o)
    {
        for (int i = 0; i < 10; ++i) c[i] -= o.c[i];
        return *this;
    }
    Jet3& operator*=(double s)
    {
        for (int i = 0; i < 10; ++i) c[i] *= s;
        return *this;
    }
};

inline Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
inline Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
inline Jet3 operator*(Jet3 a, double s) { return a *= s; }
inline Jet3 operator*(double s, Jet3 a) { return a *= s; }
inline Jet3 operator/(Jet3 a, double s) { return a *= (1.0 / s); }
inline Jet3 operator-(const Jet3& a)
{
    Jet3 r;
    for (int i = 0; i < 10; ++i) r.c[i] = -a.c[i];
    return r;
}
inline Jet3 operator+(Jet3 a, double s)
{
    a.c[0] += s;
    return a;
}
inline Jet3 operator+(double s, Jet3 a) { return a + s; }
inline Jet3 operator-(Jet3 a, double s) { return a + (-s); }
inline Jet3 operator-(double s, const Jet3& a) { return (-a) + s; }

// Leibniz rule up to order three.
inline Jet3 operator*(const Jet3& a, const Jet3& b)
{
    const auto& f = a.c;
    const auto& g = b.c;
    Jet3 h;
    h.c[0] = f[0] * g[0];
    h.c[1] = f[1] * g[0] + f[0] * g[1];
    h.c[2] = f[2] * g[0] + f[0] * g[2];
    h.c[3] = f[3] * g[0] + 2.0 * f[1] * g[1] + f[0] * g[3];
    h.c[4] = f[4] * g[0] + f[1] * g[2] + f[2] * g[1] + f[0] * g[4];
    h.c[5] = f[5] * g[0] + 2.0 * f[2] * g[2] + f[0] * g[5];
    h.c[6] = f[6] * g[0] + 3.0 * f[3] * g[1] + 3.0 * f[1] * g[3] + f[0] * g[6];
    h.c[7] = f[7] * g[0] + f[3] * g[2] + 2.0 * f[4] * g[1] + 2.0 * f[1] * g[4] +
             f[2] * g[3] + f[0] * g[7];
    h.c[8] = f[8] * g[0] + f[5] * g[1] + 2.0 * f[4] * g[2] + 2.0 * f[2] * g[4] +
             f[1] * g[5] + f[0] * g[8];
    h.c[9] = f[9] * g[0] + 3.0 * f[5] * g[2] + 3.0 * f[2] * g[5] + f[0] * g[9];
    return h;
}

// Composition h = g(f) given g and its first three derivatives at f.value().
// Faa di Bruno through order three:
//   h_i   = g1 f_i
//   h_ij  = g2 f_i f_j + g1 f_ij
//   h_ijk = g3 f_i f_j f_k + g2 (f_i f_jk + f_j f_ik + f_k f_ij) + g1 f_ijk
inline Jet3 compose(const Jet3& f, double g0, double g1, double g2, double g3)
{
    const double fu = f.c[1], fv = f.c[2];
    const double fuu = f.c[3], fuv = f.c[4], fvv = f.c[5];
    Jet3 h;
    h.c[0] = g0;
    h.c[1] = g1 * fu;
    h.c[2] = g1 * fv;
    h.c[3] = g2 * fu * fu + g1 * fuu;
    h.c[4] = g2 * fu * fv + g1 * fuv;
    h.c[5] = g2 * fv * fv + g1 * fvv;
    h.c[6] = g3 * fu * fu * fu + 3.0 * g2 * fu * fuu + g1 * f.c[6];
    h.c[7] = g3 * fu * fu * fv + g2 * (fu * fuv + fu * fuv + fv * fuu) + g1 * f.c[7];
    h.c[8] = g3 * fu * fv * fv + g2 * (fu * fvv + fv * fuv + fv * fuv) + g1 * f.c[8];
    h.c[9] = g3 * fv * fv * fv + 3.0 * g2 * fv * fvv + g1 * f.c[9];
    return h;
}

inline Jet3 sin(const Jet3& f)
{
    const double s = std::sin(f.c[0]), co = std::cos(f.c[0]);
    return compose(f, s, co, -s, -co);
}
inline Jet3 cos(const Jet3& f)
{
    const double s = std::sin(f.c[0]), co = std::cos(f.c[0]);
    return compose(f, co, -s, -co, s);
}
inline Jet3 sqrt(const Jet3& f)
{
    const double r = std::sqrt(f.c[0]);
    if (!(r > 0.0)) throw std::domain_error("jet sqrt of non-positive value");
    return compose(f, r, 0.5 / r, -0.25 / (r * f.c[0]), 0.375 / (r * f.c[0] * f.c[0]));
}
inline Jet3 reciprocal(const Jet3& f)
{
    const double x = f.c[0];
    if (x == 0.0) throw std::domain_error("jet reciprocal of zero");
    const double ix = 1.0 / x;
    return compose(f, ix, -ix * ix, 2.0 * ix * ix * ix, -6.0 * ix * ix * ix * ix);
}
inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }

inline Jet3 pow_i(const Jet3& f, int k)
{
    if (k < 0) return reciprocal(pow_i(f, -k));
    Jet3 r = Jet3::constant(1.0);
    for (int i = 0; i < k; ++i) r = r * f;
    return r;
}

// Complex jet: first and second components are real and imaginary parts.
struct CJet3 {
    Jet3 re, im;

    CJet3() = default;
    CJet3(Jet3 r, Jet3 i) : re(std::move(r)), im(std::move(i)) {}
    static CJet3 constant(double r, double i)
    {
        return {Jet3::constant(r), Jet3::constant(i)};
    }
};

inline CJet3 operator+(const CJet3& a, const CJet3& b) { return {a.re + b.re, a.im + b.im}; }
inline CJet3 operator*(const CJet3& a, const CJet3& b)
{
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

} // namespace nframes
