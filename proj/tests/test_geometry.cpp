#include <catch2/catch_amalgamated.hpp>

#include "nframes/frames.hpp"
#include "nframes/geometry.hpp"
#include "nframes/integrability.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace nframes;

namespace {

// the Clifford catalog frame at a parameter point
Eigen::MatrixXd clifford_frame(double u, double v)
{
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd N(2, 4);
    N.row(0) << s * std::cos(u), s * std::sin(u), s * std::cos(v), s * std::sin(v);
    N.row(1) << s * std::cos(u), s * std::sin(u), -s * std::cos(v), -s * std::sin(v);
    return N;
}

} // namespace

TEST_CASE("fundamental forms at reference points")
{
    const auto cliff = builtin_surface("clifford");
    const JetSample cj = evaluate_jet(cliff, 0.3, -0.4);
    const auto cf = fundamental_forms(cj, clifford_frame(0.3, -0.4));
    CHECK(cf.g(0, 0) == Catch::Approx(0.5));
    CHECK(cf.g(1, 1) == Catch::Approx(0.5));
    CHECK(std::abs(cf.g(0, 1)) < 1e-15);
    CHECK(cf.W == Catch::Approx(0.5));
    CHECK((cf.g * cf.g_inv - Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK(std::abs(cf.W * cf.W - cf.g.determinant()) < 1e-12);

    const auto flat = builtin_surface("graph");
    const JetSample fj = evaluate_jet(flat, 0.2, 0.1);
    Eigen::MatrixXd Nf = Eigen::MatrixXd::Zero(2, 4);
    Nf(0, 2) = 1.0;
    Nf(1, 3) = 1.0;
    const auto ff = fundamental_forms(fj, Nf);
    CHECK((ff.g - Eigen::Matrix2d::Identity()).norm() < 1e-15);
    CHECK(ff.W == Catch::Approx(1.0));
    CHECK(ff.L[0].norm() == 0.0);
    CHECK(ff.L[1].norm() == 0.0);

    const auto holo = builtin_surface("holomorphic_graph");
    const JetSample hj = evaluate_jet(holo, 0.0, 0.0);
    const auto hf = fundamental_forms(hj, Nf); // Euler frame at the origin
    CHECK(hf.W == Catch::Approx(1.0));
    Eigen::Matrix2d L1, L2;
    L1 << 2, 0, 0, -2;
    L2 << 0, 2, 2, 0;
    CHECK((hf.L[0] - L1).norm() < 1e-14);
    CHECK((hf.L[1] - L2).norm() < 1e-14);

    // non-orthonormal frame rejected
    Eigen::MatrixXd bad = Nf;
    bad(0, 2) = 2.0;
    CHECK_THROWS_AS(fundamental_forms(hj, bad), geometry_error);
}

TEST_CASE("christoffel symbols")
{
    const auto cliff = builtin_surface("clifford");
    const auto cc = christoffel(evaluate_jet(cliff, 0.4, 0.2));
    double sup = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) sup = std::max(sup, std::abs(cc.G[k][i][j]));
    CHECK(sup < 1e-13); // constant metric

    // W = 1 + 4 r^2, Gamma^1_11 = W_u / (2W); at (0.5, 0): 4/4 = 1
    const auto holo = builtin_surface("holomorphic_graph");
    const auto hc = christoffel(evaluate_jet(holo, 0.5, 0.0));
    CHECK(hc.G[0][0][0] == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(hc.G[0][0][1] == hc.G[0][1][0]); // lower-index symmetry exact

    const auto flat = builtin_surface("graph");
    const auto fc = christoffel(evaluate_jet(flat, 0.3, 0.3));
    CHECK(std::abs(fc.G[0][0][0]) + std::abs(fc.G[1][1][1]) == 0.0);
}

TEST_CASE("curvature scalars at reference points")
{
    const auto cliff = builtin_surface("clifford");
    const JetSample cj = evaluate_jet(cliff, -0.2, 0.6);
    const auto cs = curvatures(fundamental_forms(cj, clifford_frame(-0.2, 0.6)));
    CHECK(cs.K_sigma[0] == Catch::Approx(1.0));
    CHECK(cs.K_sigma[1] == Catch::Approx(-1.0));
    CHECK(cs.K == Catch::Approx(0.0).margin(1e-12));
    CHECK(cs.H_sigma[0] == Catch::Approx(-1.0));
    CHECK(cs.H_sigma[1] == Catch::Approx(0.0).margin(1e-12));

    const auto holo = builtin_surface("holomorphic_graph");
    Eigen::MatrixXd N0 = Eigen::MatrixXd::Zero(2, 4);
    N0(0, 2) = 1.0;
    N0(1, 3) = 1.0;
    const auto hs = curvatures(fundamental_forms(evaluate_jet(holo, 0.0, 0.0), N0));
    CHECK(hs.K_sigma[0] == Catch::Approx(-4.0));
    CHECK(hs.K_sigma[1] == Catch::Approx(-4.0));
    CHECK(hs.H_sigma.norm() < 1e-14);            // minimal graph
    CHECK(hs.R2112 == Catch::Approx(hs.K));      // W = 1 at the origin
}

TEST_CASE("K and |H|^2 are frame-rotation invariants; components are not")
{
    // asymmetric graph so that K_1 != K_2
    json params;
    params["heights"] =
        json::array({json::array({json::array({2, 0, 0.4}), json::array({1, 1, 0.1})}),
                     json::array({json::array({0, 2, 0.3}), json::array({2, 0, -0.2})})});
    const auto spec = builtin_surface("graph", params);
    const PolarGrid g(16, 32);
    const auto sg = make_surface_grid(spec, g);
    const auto F = euler_gram_schmidt_frame(sg);
    const std::size_t at = g.index(9, 11);
    const JetSample& j = sg.at(at);
    const Eigen::MatrixXd N = F.N[at];

    const auto base = curvatures(fundamental_forms(j, N));
    REQUIRE(std::abs(base.K_sigma[0] - base.K_sigma[1]) > 1e-4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
    bool component_changed = false;
    for (int k = 0; k < 10; ++k) {
        const double a = ang(rng);
        Eigen::Matrix2d R;
        R << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
        const auto rot = curvatures(fundamental_forms(j, (R * N).eval()));
        CHECK(std::abs(rot.K - base.K) < 1e-10);
        CHECK(std::abs(rot.H_sigma.squaredNorm() - base.H_sigma.squaredNorm()) < 1e-10);
        if (std::abs(rot.K_sigma[0] - base.K_sigma[0]) > 1e-6) component_changed = true;
    }
    CHECK(component_changed);
}

TEST_CASE("integrability residuals: analytic path on flat plane and Clifford")
{
    const PolarGrid g(16, 32);
    for (const char* name : {"graph", "clifford"}) {
        const auto sg = make_surface_grid(builtin_surface(name), g);
        const auto F = euler_gram_schmidt_frame(sg);
        const auto rep = integrability_residuals(sg, F);
        CAPTURE(name);
        CHECK(rep.gauss_eq <= 1e-8);
        CHECK(rep.weingarten <= 1e-8);
        CHECK(rep.codazzi_mainardi <= 1e-8);
        CHECK(rep.gauss_integrability <= 1e-8);
        CHECK(rep.ricci <= 1e-8);
        CHECK(rep.egregium <= 1e-8);
        CHECK_FALSE(rep.mean_curvature_skipped);
        CHECK(rep.mean_curvature_system <= 1e-8);
    }
}

TEST_CASE("integrability residuals: FD path converges on the holomorphic graph")
{
    auto run = [](int nr, int nt) {
        const PolarGrid g(nr, nt);
        const auto sg = make_surface_grid(builtin_surface("holomorphic_graph"), g);
        const auto F = euler_gram_schmidt_frame(sg);
        return integrability_residuals(sg, F);
    };
    const auto r1 = run(64, 128);
    const auto r2 = run(128, 256);
    // analytic entries stay at rounding level
    CHECK(r1.gauss_eq <= 1e-10);
    CHECK(r1.weingarten <= 1e-10);
    CHECK(r1.egregium <= 1e-10);
    CHECK(r1.mean_curvature_system <= 1e-10);
    // FD entries decrease at order ~2 and reach 1e-3 at 128x256
    CHECK(r1.codazzi_mainardi / r2.codazzi_mainardi > 3.5);
    CHECK(r1.ricci / r2.ricci > 3.5);
    CHECK(r2.codazzi_mainardi < 1e-3);
    CHECK(r2.ricci < 1e-3);
}

TEST_CASE("veronese chart: residuals hold on a non-conformal chart")
{
    const PolarGrid g(16, 32);
    const auto sg = make_surface_grid(builtin_surface("veronese"), g);
    const auto F = euler_gram_schmidt_frame(sg);
    const auto rep = integrability_residuals(sg, F);
    CHECK(rep.gauss_eq <= 1e-8);
    CHECK(rep.weingarten <= 1e-8);
    CHECK(rep.egregium <= 1e-8);
    CHECK(rep.mean_curvature_skipped);
    CHECK(rep.codazzi_mainardi <= 5e-2); // FD path on a coarse grid
}

TEST_CASE("maximum principle for |X|^2 under |H| <= 1")
{
    const PolarGrid g(24, 48);
    for (const char* name : {"clifford", "spherical", "holomorphic_graph"}) {
        const auto sg = make_surface_grid(builtin_surface(name), g);
        const auto F = euler_gram_schmidt_frame(sg);
        const auto forms = forms_field(sg, F);

        double hsup = 0.0;
        for (std::size_t idx = 0; idx < g.size(); ++idx)
            hsup = std::max(hsup, curvatures(forms[idx]).H_sigma.norm());
        REQUIRE(hsup <= 1.0 + 1e-12);

        double interior = 0.0, boundary = 0.0;
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            const double n2 = sg.at(idx).X.squaredNorm();
            if (g.is_boundary(idx))
                boundary = std::max(boundary, n2);
            else
                interior = std::max(interior, n2);
        }
        CAPTURE(name);
        CHECK(interior <= boundary + 1e-9);
    }
}
