#include <catch2/catch_amalgamated.hpp>

#include "nframes/surfaces.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nframes;

namespace {

double jet_sup_distance(const JetSample& a, const JetSample& b)
{
    double m = 0.0;
    const Eigen::VectorXd* pa[] = {&a.Xu, &a.Xv, &a.Xuu, &a.Xuv, &a.Xvv,
                                   &a.Xuuu, &a.Xuuv, &a.Xuvv, &a.Xvvv};
    const Eigen::VectorXd* pb[] = {&b.Xu, &b.Xv, &b.Xuu, &b.Xuv, &b.Xvv,
                                   &b.Xuuu, &b.Xuuv, &b.Xuvv, &b.Xvvv};
    for (int k = 0; k < 9; ++k) m = std::max(m, (*pa[k] - *pb[k]).cwiseAbs().maxCoeff());
    return m;
}

} // namespace

TEST_CASE("catalog jets at reference points")
{
    const double s = 1.0 / std::sqrt(2.0);

    const auto clifford = builtin_surface("clifford");
    const JetSample c0 = evaluate_jet(clifford, 0.0, 0.0);
    CHECK((c0.X - s * Eigen::Vector4d(1, 0, 1, 0).eval()).norm() < 1e-15);
    CHECK((c0.Xu - s * Eigen::Vector4d(0, 1, 0, 0).eval()).norm() < 1e-15);

    const auto holo = builtin_surface("holomorphic_graph"); // Phi = w^2
    const JetSample h0 = evaluate_jet(holo, 0.0, 0.0);
    CHECK(h0.X.norm() < 1e-15);
    CHECK((h0.Xuu - Eigen::Vector4d(0, 0, 2, 0).eval()).norm() < 1e-15);
    const JetSample h1 = evaluate_jet(holo, 0.3, -0.2);
    CHECK(h1.X[2] == Catch::Approx(0.3 * 0.3 - 0.2 * 0.2));
    CHECK(h1.X[3] == Catch::Approx(2 * 0.3 * -0.2));

    const auto flat = builtin_surface("graph"); // z_1 = z_2 = 0
    const JetSample f0 = evaluate_jet(flat, 0.4, 0.1);
    CHECK(f0.Xuu.norm() == 0.0);
    CHECK(f0.Xuv.norm() == 0.0);
    CHECK(f0.Xvv.norm() == 0.0);

    CHECK_THROWS_AS(evaluate_jet(clifford, 0.9, 0.9), surface_error);
    CHECK_THROWS_AS(builtin_surface("moebius"), surface_error);
    CHECK_THROWS_AS(builtin_surface("veronese", json{{"stheta", 2.0}}), surface_error);
    CHECK_THROWS_AS(
        builtin_surface("graph",
                        json{{"heights", json::array({json::array({json::array({1, 1})})})}}),
        surface_error);
}

TEST_CASE("spherical surface sits on the unit sphere")
{
    const auto sph = builtin_surface("spherical");
    for (double r : {0.0, 0.3, 0.8}) {
        const JetSample j = evaluate_jet(sph, r, -0.5 * r);
        CHECK(j.X.norm() == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("conformality claim matches the metric from analytic jets")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0, 0.97);
    for (const auto& name : surface_catalog_names()) {
        const auto spec = builtin_surface(name);
        for (int k = 0; k < 40; ++k) {
            const double r = rad(rng), t = ang(rng);
            const JetSample j = evaluate_jet(spec, r * std::cos(t), r * std::sin(t));
            const double g11 = j.Xu.dot(j.Xu), g22 = j.Xv.dot(j.Xv), g12 = j.Xu.dot(j.Xv);
            const double w2 = g11 * g22 - g12 * g12;
            CHECK(w2 > 0.0); // immersion check
            if (spec.conformal_claim) CHECK(std::abs(g11 - g22) + std::abs(g12) <= 1e-12);
        }
    }
}

TEST_CASE("fd_jet_oracle matches analytic jets and converges at order >= 1.9")
{
    const auto holo = builtin_surface("holomorphic_graph");
    const JetSample a = evaluate_jet(holo, 0.3, 0.2);
    const JetSample o = fd_jet_oracle(holo, 0.3, 0.2, 1e-4);
    CHECK((a.Xuu - o.Xuu).cwiseAbs().maxCoeff() < 1e-6);

    // boundary point forces the one-sided stencils
    const auto cliff = builtin_surface("clifford");
    const JetSample ab = evaluate_jet(cliff, 1.0, 0.0);
    const JetSample ob = fd_jet_oracle(cliff, 1.0, 0.0, 1e-4);
    CHECK((ab.Xu - ob.Xu).cwiseAbs().maxCoeff() < 1e-7);

    // constant map: every derivative vanishes
    ImmersionSpec constant;
    constant.name = "constant";
    constant.codimension = 2;
    constant.evaluator = [](double, double) {
        return std::vector<Jet3>{Jet3::constant(1.0), Jet3::constant(-2.0), Jet3::constant(0.5),
                                 Jet3::constant(3.0)};
    };
    const JetSample oc = fd_jet_oracle(constant, 0.2, -0.1, 1e-3);
    CHECK(oc.Xu.norm() < 1e-12);
    CHECK(oc.Xuuu.norm() < 1e-4);

    CHECK_THROWS_AS(fd_jet_oracle(holo, 0.0, 0.0, 1e-11), surface_error);

    // order study over random interior points, all catalog surfaces
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0, 0.9);
    for (const auto& name : surface_catalog_names()) {
        const auto spec = builtin_surface(name);
        double e1 = 0.0, e2 = 0.0;
        for (int k = 0; k < 100; ++k) {
            const double r = rad(rng), t = ang(rng);
            const double u = r * std::cos(t), v = r * std::sin(t);
            const JetSample exact = evaluate_jet(spec, u, v);
            e1 = std::max(e1, jet_sup_distance(exact, fd_jet_oracle(spec, u, v, 2e-2)));
            e2 = std::max(e2, jet_sup_distance(exact, fd_jet_oracle(spec, u, v, 1e-2)));
        }
        CHECK(e1 <= 100.0 * 2e-2 * 2e-2); // |error| <= C step^2 with C = 100
        if (e2 > 1e-9) {                  // above the roundoff floor
            const double order = std::log2(e1 / e2);
            CHECK(order >= 1.9);
        } else {
            CHECK(e1 < 1e-8); // stencils exact on polynomial surfaces
        }
    }
}
