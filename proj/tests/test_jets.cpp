#include <catch2/catch_amalgamated.hpp>

#include "nframes/jets.hpp"

#include <cmath>

using namespace nframes;

namespace {

// All ten coefficients of u^3 v at (u0,v0), by hand.
Jet3 u3v(double u0, double v0)
{
    const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);
    return u * u * u * v;
}

} // namespace

TEST_CASE("jet product reproduces monomial derivatives")
{
    const double u0 = 0.7, v0 = -0.4;
    const Jet3 j = u3v(u0, v0);
    CHECK(j.value() == Catch::Approx(u0 * u0 * u0 * v0));
    CHECK(j.du() == Catch::Approx(3 * u0 * u0 * v0));
    CHECK(j.dv() == Catch::Approx(u0 * u0 * u0));
    CHECK(j.duu() == Catch::Approx(6 * u0 * v0));
    CHECK(j.duv() == Catch::Approx(3 * u0 * u0));
    CHECK(j.dvv() == Catch::Approx(0.0).margin(1e-15));
    CHECK(j.duuu() == Catch::Approx(6 * v0));
    CHECK(j.duuv() == Catch::Approx(6 * u0));
    CHECK(j.duvv() == Catch::Approx(0.0).margin(1e-15));
    CHECK(j.dvvv() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("jet composition: sin, cos, sqrt, reciprocal")
{
    const double u0 = 0.3, v0 = 0.2;
    const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);

    // f = sin(u*v): f_uv = cos(uv) - uv sin(uv); f_uuv = -2v sin - uv^2 cos ... spot check f_uv
    const Jet3 s = sin(u * v);
    CHECK(s.value() == Catch::Approx(std::sin(u0 * v0)));
    CHECK(s.duv() == Catch::Approx(std::cos(u0 * v0) - u0 * v0 * std::sin(u0 * v0)));
    CHECK(s.duuu() == Catch::Approx(-std::cos(u0 * v0) * v0 * v0 * v0).epsilon(1e-12));

    // g = 1/sqrt(1+u^2+v^2): compare against finite differences of the closed form
    auto closed = [](double a, double b) { return 1.0 / std::sqrt(1.0 + a * a + b * b); };
    const Jet3 gjet = reciprocal(sqrt(1.0 + u * u + v * v));
    const double h = 1e-5;
    const double fd_uv = (closed(u0 + h, v0 + h) - closed(u0 + h, v0 - h) -
                          closed(u0 - h, v0 + h) + closed(u0 - h, v0 - h)) /
                         (4 * h * h);
    CHECK(gjet.duv() == Catch::Approx(fd_uv).margin(1e-7));
    // d^3/du^3 (1+u^2+v^2)^(-1/2) = 9u t^(-5/2) - 15u^3 t^(-7/2), t = 1+u^2+v^2
    const double t = 1.0 + u0 * u0 + v0 * v0;
    const double duuu = 9 * u0 * std::pow(t, -2.5) - 15 * u0 * u0 * u0 * std::pow(t, -3.5);
    CHECK(gjet.duuu() == Catch::Approx(duuu).epsilon(1e-12));
}

TEST_CASE("complex jet square matches (u+iv)^2")
{
    const double u0 = 0.4, v0 = -0.3;
    const CJet3 w{Jet3::var_u(u0), Jet3::var_v(v0)};
    const CJet3 w2 = w * w;
    CHECK(w2.re.value() == Catch::Approx(u0 * u0 - v0 * v0));
    CHECK(w2.im.value() == Catch::Approx(2 * u0 * v0));
    CHECK(w2.re.duu() == Catch::Approx(2.0));
    CHECK(w2.re.dvv() == Catch::Approx(-2.0));
    CHECK(w2.im.duv() == Catch::Approx(2.0));
    CHECK(w2.im.duu() == Catch::Approx(0.0).margin(1e-15));
}
