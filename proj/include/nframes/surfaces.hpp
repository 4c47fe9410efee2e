#pragma once

// Immersions of the closed unit disc into R^(n+2) as jet evaluators.
//
// Every catalog surface is written in third-order jet arithmetic, so the
// returned derivatives are exact to rounding and mixed partials are
// symmetric by construction.  Third-order jets are carried because the
// integrability residuals differentiate Gamma and L once.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nframes/grid.hpp" // fd_weights
#include "nframes/jets.hpp"

namespace nframes {

using json = nlohmann::json;

struct surface_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full jet of the immersion at one parameter point.
struct JetSample {
    double u = 0.0, v = 0.0;
    Eigen::VectorXd X, Xu, Xv, Xuu, Xuv, Xvv, Xuuu, Xuuv, Xuvv, Xvvv;

    int ambient_dim() const { return static_cast<int>(X.size()); }

    // second derivative by index pair (1=u, 2=v)
    const Eigen::VectorXd& d2(int i, int j) const
    {
        if (i == 1 && j == 1) return Xuu;
        if (i == 2 && j == 2) return Xvv;
        return Xuv;
    }
    // third derivative d2(i,j) differentiated along k
    const Eigen::VectorXd& d3(int i, int j, int k) const
    {
        const int m = (i - 1) + (j - 1) + (k - 1);
        switch (m) {
            case 0: return Xuuu;
            case 1: return Xuuv;
            case 2: return Xuvv;
            default: return Xvvv;
        }
    }
};

// How normal-frame seed vectors are obtained for this surface.
enum class SeedKind {
    closed_form,       // surface ships analytic seed vectors
    graph_euler,       // Euler normals of a graph, read off the jets
    generic_projection // ambient basis vectors projected off the tangent plane
};

struct ImmersionSpec {
    std::string name;
    int codimension = 0;
    bool conformal_claim = false;
    json params;
    SeedKind seed_kind = SeedKind::generic_projection;

    // per ambient component, third-order jet at (u,v)
    std::function<std::vector<Jet3>(double, double)> evaluator;
    // closed-form seed vectors (value plus first derivatives via jets);
    // only used when seed_kind == closed_form
    std::function<std::vector<std::vector<Jet3>>(double, double)> seeds;

    int ambient_dim() const { return codimension + 2; }
};

namespace detail {

inline JetSample pack_sample(double u, double v, const std::vector<Jet3>& comps)
{
    const int m = static_cast<int>(comps.size());
    JetSample s;
    s.u = u;
    s.v = v;
    for (Eigen::VectorXd* vec :
         {&s.X, &s.Xu, &s.Xv, &s.Xuu, &s.Xuv, &s.Xvv, &s.Xuuu, &s.Xuuv, &s.Xuvv, &s.Xvvv})
        vec->resize(m);
    for (int k = 0; k < m; ++k) {
        const auto& c = comps[k].c;
        s.X[k] = c[0];
        s.Xu[k] = c[1];
        s.Xv[k] = c[2];
        s.Xuu[k] = c[3];
        s.Xuv[k] = c[4];
        s.Xvv[k] = c[5];
        s.Xuuu[k] = c[6];
        s.Xuuv[k] = c[7];
        s.Xuvv[k] = c[8];
        s.Xvvv[k] = c[9];
    }
    return s;
}

} // namespace detail

inline JetSample evaluate_jet(const ImmersionSpec& spec, double u, double v)
{
    if (u * u + v * v > 1.0 + 1e-12)
        throw surface_error("parameter point (" + std::to_string(u) + "," + std::to_string(v) +
                            ") lies outside the closed unit disc");
    return detail::pack_sample(u, v, spec.evaluator(u, v));
}

// ---------------------------------------------------------------- catalog

namespace detail {

inline std::vector<Jet3> clifford_jets(double u0, double v0)
{
    const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);
    const double s = 1.0 / std::sqrt(2.0);
    return {s * cos(u), s * sin(u), s * cos(v), s * sin(v)};
}

inline std::vector<std::vector<Jet3>> clifford_seeds(double u0, double v0)
{
    const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);
    const double s = 1.0 / std::sqrt(2.0);
    // N1 = X; N2 chosen so that (Xu, Xv, N1, N2) is positively oriented
    std::vector<Jet3> n1 = {s * cos(u), s * sin(u), s * cos(v), s * sin(v)};
    std::vector<Jet3> n2 = {s * cos(u), s * sin(u), -1.0 * s * cos(v), -1.0 * s * sin(v)};
    return {n1, n2};
}

inline std::vector<Jet3> spherical_jets(double u0, double v0)
{
    // inverse stereographic chart of the unit sphere, padded into R^4;
    // conformal with factor 4/(1+r^2)^2
    const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);
    const Jet3 rho = u * u + v * v;
    const Jet3 inv = reciprocal(1.0 + rho);
    return {2.0 * u * inv, 2.0 * v * inv, (1.0 - rho) * inv, Jet3::constant(0.0)};
}

inline std::vector<std::vector<Jet3>> spherical_seeds(double u0, double v0)
{
    auto x = spherical_jets(u0, v0);
    std::vector<Jet3> n2 = {Jet3::constant(0.0), Jet3::constant(0.0), Jet3::constant(0.0),
                            Jet3::constant(1.0)};
    return {x, n2};
}

inline std::vector<Jet3> parallel_jets(double u0, double v0, double f, double g)
{
    // normal transport of the Clifford torus along its parallel frame:
    // R = X + f N1 + g N2 is again a product torus with radii a and b
    const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);
    const double s = 1.0 / std::sqrt(2.0);
    const double a = s * (1.0 + f + g), b = s * (1.0 + f - g);
    return {a * cos(u), a * sin(u), b * cos(v), b * sin(v)};
}

inline std::vector<std::vector<Jet3>> parallel_seeds(double u0, double v0)
{
    const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);
    const Jet3 zero = Jet3::constant(0.0);
    std::vector<Jet3> n1 = {cos(u), sin(u), zero, zero};
    std::vector<Jet3> n2 = {zero, zero, -1.0 * cos(v), -1.0 * sin(v)};
    return {n1, n2};
}

struct PolyTerm {
    int pu = 0, pv = 0;
    double coeff = 0.0;
};

inline Jet3 eval_poly(const std::vector<PolyTerm>& terms, const Jet3& u, const Jet3& v)
{
    Jet3 acc = Jet3::constant(0.0);
    for (const auto& t : terms) acc += t.coeff * pow_i(u, t.pu) * pow_i(v, t.pv);
    return acc;
}

inline std::vector<PolyTerm> parse_poly(const json& jp)
{
    std::vector<PolyTerm> poly;
    for (const auto& term : jp) {
        if (!term.is_array() || term.size() != 3)
            throw surface_error("polynomial term must be [pu, pv, coeff]");
        PolyTerm t;
        t.pu = term[0].get<int>();
        t.pv = term[1].get<int>();
        t.coeff = term[2].get<double>();
        if (t.pu < 0 || t.pv < 0) throw surface_error("negative monomial exponent");
        poly.push_back(t);
    }
    return poly;
}

// Components of a symmetric traceless 3x3 matrix in the chart used for the
// Veronese surface; the map is angle-preserving up to the factor 1/6, i.e.
// <v(B), v(C)> = tr(BC)/6, so matrix orthogonality transfers to R^5.
inline std::vector<Jet3> veronese_embed(const Jet3 B[3][3], double scale)
{
    const double q = std::sqrt(3.0);
    return {scale / q * B[1][2], scale / q * B[0][2], scale / q * B[0][1],
            scale / (2.0 * q) * (B[0][0] - B[1][1]),
            (scale / 6.0) * (B[0][0] + B[1][1] - 2.0 * B[2][2])};
}

struct VeroneseChart {
    double lambda, theta0, stheta, sphi;

    void angles(double u0, double v0, Jet3& th, Jet3& ph) const
    {
        th = theta0 + stheta * Jet3::var_u(u0);
        ph = sphi * Jet3::var_v(v0);
    }

    // p on the sphere of radius sqrt(3); q, r an orthonormal tangent basis
    void sphere_frame(const Jet3& th, const Jet3& ph, Jet3 p[3], Jet3 q[3], Jet3 r[3]) const
    {
        const double s3 = std::sqrt(3.0);
        p[0] = s3 * sin(th) * cos(ph);
        p[1] = s3 * sin(th) * sin(ph);
        p[2] = s3 * cos(th);
        q[0] = cos(th) * cos(ph);
        q[1] = cos(th) * sin(ph);
        q[2] = -1.0 * sin(th);
        r[0] = -1.0 * sin(ph);
        r[1] = cos(ph);
        r[2] = Jet3::constant(0.0);
    }

    std::vector<Jet3> position(double u0, double v0) const
    {
        Jet3 th, ph, p[3], q[3], r[3];
        angles(u0, v0, th, ph);
        sphere_frame(th, ph, p, q, r);
        Jet3 B[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) B[a][b] = p[a] * p[b];
        return veronese_embed(B, lambda);
    }

    // The normal space of the matrix model at p p^t is spanned by
    //   p p^t - I,  q q^t - r r^t,  q r^t + r q^t,
    // a smooth pairwise-orthogonal set over the pole-free chart.
    std::vector<std::vector<Jet3>> seeds(double u0, double v0) const
    {
        Jet3 th, ph, p[3], q[3], r[3];
        angles(u0, v0, th, ph);
        sphere_frame(th, ph, p, q, r);
        Jet3 B1[3][3], B2[3][3], B3[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                B1[a][b] = p[a] * p[b] - (a == b ? 1.0 : 0.0);
                B2[a][b] = q[a] * q[b] - r[a] * r[b];
                B3[a][b] = q[a] * r[b] + r[a] * q[b];
            }
        return {veronese_embed(B1, 1.0), veronese_embed(B2, 1.0), veronese_embed(B3, 1.0)};
    }
};

} // namespace detail

inline std::vector<std::string> surface_catalog_names()
{
    return {"clifford", "holomorphic_graph", "graph", "spherical", "veronese", "parallel_type"};
}

inline ImmersionSpec builtin_surface(const std::string& name, const json& params = json::object())
{
    ImmersionSpec spec;
    spec.name = name;
    spec.params = params;

    if (name == "clifford") {
        spec.codimension = 2;
        spec.conformal_claim = true;
        spec.seed_kind = SeedKind::closed_form;
        spec.evaluator = [](double u, double v) { return detail::clifford_jets(u, v); };
        spec.seeds = [](double u, double v) { return detail::clifford_seeds(u, v); };
    } else if (name == "spherical") {
        spec.codimension = 2;
        spec.conformal_claim = true;
        spec.seed_kind = SeedKind::closed_form;
        spec.evaluator = [](double u, double v) { return detail::spherical_jets(u, v); };
        spec.seeds = [](double u, double v) { return detail::spherical_seeds(u, v); };
    } else if (name == "parallel_type") {
        const double f = params.value("f", 0.1);
        const double g = params.value("g", 0.0);
        if (std::abs(1.0 + f + g) < 1e-12 || std::abs(1.0 + f - g) < 1e-12)
            throw surface_error("parallel_type: degenerate radii (1+f+g and 1+f-g must be nonzero)");
        spec.codimension = 2;
        spec.conformal_claim = (g == 0.0);
        spec.seed_kind = SeedKind::closed_form;
        spec.evaluator = [f, g](double u, double v) { return detail::parallel_jets(u, v, f, g); };
        spec.seeds = [](double u, double v) { return detail::parallel_seeds(u, v); };
    } else if (name == "holomorphic_graph") {
        // heights are real and imaginary part of a polynomial Phi(w)
        std::vector<std::pair<double, double>> coeffs;
        if (params.contains("coeffs")) {
            for (const auto& c : params["coeffs"]) {
                if (c.is_number())
                    coeffs.emplace_back(c.get<double>(), 0.0);
                else if (c.is_array() && c.size() == 2)
                    coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
                else
                    throw surface_error("holomorphic_graph: coefficient must be a number or [re,im]");
            }
        } else {
            coeffs = {{0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}; // Phi(w) = w^2
        }
        spec.codimension = 2;
        spec.conformal_claim = true;
        spec.seed_kind = SeedKind::graph_euler;
        spec.evaluator = [coeffs](double u0, double v0) {
            const CJet3 w{Jet3::var_u(u0), Jet3::var_v(v0)};
            CJet3 acc = CJet3::constant(0.0, 0.0);
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
                acc = acc * w + CJet3::constant(it->first, it->second);
            return std::vector<Jet3>{Jet3::var_u(u0), Jet3::var_v(v0), acc.re, acc.im};
        };
    } else if (name == "graph") {
        std::vector<std::vector<detail::PolyTerm>> heights;
        if (params.contains("heights")) {
            for (const auto& jp : params["heights"]) heights.push_back(detail::parse_poly(jp));
        } else {
            heights.resize(2); // flat plane in R^4
        }
        if (heights.empty()) throw surface_error("graph: needs at least one height function");
        spec.codimension = static_cast<int>(heights.size());
        spec.conformal_claim = false;
        spec.seed_kind = SeedKind::graph_euler;
        spec.evaluator = [heights](double u0, double v0) {
            const Jet3 u = Jet3::var_u(u0), v = Jet3::var_v(v0);
            std::vector<Jet3> comps = {u, v};
            for (const auto& poly : heights) comps.push_back(detail::eval_poly(poly, u, v));
            return comps;
        };
    } else if (name == "veronese") {
        const double lambda = params.value("lambda", 1.0);
        const double theta0 = params.value("theta0", 0.5 * std::numbers::pi);
        const double stheta = params.value("stheta", 0.5);
        const double sphi = params.value("sphi", 0.5);
        if (theta0 - std::abs(stheta) <= 0.0 || theta0 + std::abs(stheta) >= std::numbers::pi)
            throw surface_error("veronese: chart must avoid the poles");
        spec.codimension = 3;
        spec.conformal_claim = false;
        spec.seed_kind = SeedKind::closed_form;
        const detail::VeroneseChart chart{lambda, theta0, stheta, sphi};
        spec.evaluator = [chart](double u, double v) { return chart.position(u, v); };
        spec.seeds = [chart](double u, double v) { return chart.seeds(u, v); };
    } else {
        throw surface_error("unknown surface '" + name + "'");
    }
    return spec;
}

inline ImmersionSpec surface_from_config(const json& config)
{
    if (!config.contains("surface") || !config["surface"].contains("name"))
        throw surface_error("config: missing surface.name");
    const auto& s = config["surface"];
    return builtin_surface(s["name"].get<std::string>(), s.value("params", json::object()));
}

// ------------------------------------------------------- derivative oracle

// Jet computed from position evaluations only; cross-check for the analytic
// evaluators.  Central stencils by default, one-sided toward the interior
// when the stencil would leave the disc.
inline JetSample fd_jet_oracle(const ImmersionSpec& spec, double u, double v, double step)
{
    if (step <= 0.0) throw surface_error("fd_jet_oracle: step must be positive");
    if (step < 1e-10) throw surface_error("fd_jet_oracle: step below cancellation guard 1e-10");

    struct Stencil {
        std::vector<double> off;
        std::vector<double> w;
    };
    auto make = [&](int order, int dir) {
        std::vector<double> off;
        if (dir == 0) {
            switch (order) {
                case 0: off = {0}; break;
                case 1: off = {-1, 1}; break;
                case 2: off = {-1, 0, 1}; break;
                default: off = {-2, -1, 1, 2}; break;
            }
        } else {
            const int len = (order == 0) ? 1 : order + 2;
            for (int k = 0; k < len; ++k) off.push_back(dir * k);
        }
        std::vector<double> x;
        for (double o : off) x.push_back(o * step);
        Stencil s;
        s.off = off;
        s.w = fd_weights(0.0, x, order);
        return s;
    };

    // Excursion of the worst sample beyond the rim.  Central stencils win
    // when they fit; otherwise the variant shifted farthest inward is used.
    // Samples of the winning stencil may still graze past r = 1 by O(step)
    // at exact boundary points (tangential steps); the catalog charts all
    // extend smoothly across the rim, so they are evaluated directly.
    auto excursion = [&](const Stencil& su, const Stencil& sv) {
        double worst = 0.0;
        for (double ou : su.off)
            for (double ov : sv.off) {
                const double uu = u + ou * step, vv = v + ov * step;
                worst = std::max(worst, std::sqrt(uu * uu + vv * vv) - 1.0);
            }
        return std::max(worst, 0.0);
    };

    auto pick_dirs = [&](int ou_order, int ov_order) -> std::pair<Stencil, Stencil> {
        const int du = (u >= 0.0) ? -1 : 1;
        const int dv = (v >= 0.0) ? -1 : 1;
        std::pair<Stencil, Stencil> best;
        double best_score = -1.0;
        for (auto [au, av] : {std::pair{0, 0}, {du, 0}, {0, dv}, {du, dv}}) {
            Stencil su = make(ou_order, au), sv = make(ov_order, av);
            const double score = excursion(su, sv);
            if (score == 0.0) return {su, sv};
            if (best_score < 0.0 || score < best_score) {
                best_score = score;
                best = {std::move(su), std::move(sv)};
            }
        }
        return best;
    };

    auto derivative = [&](int ou, int ov) {
        auto [su, sv] = pick_dirs(ou, ov);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(spec.ambient_dim());
        for (std::size_t a = 0; a < su.off.size(); ++a)
            for (std::size_t b = 0; b < sv.off.size(); ++b) {
                const double wgt = su.w[a] * sv.w[b];
                if (wgt == 0.0) continue;
                const auto comps = spec.evaluator(u + su.off[a] * step, v + sv.off[b] * step);
                for (int k = 0; k < acc.size(); ++k) acc[k] += wgt * comps[k].value();
            }
        return acc;
    };

    JetSample s;
    s.u = u;
    s.v = v;
    s.X = evaluate_jet(spec, u, v).X;
    s.Xu = derivative(1, 0);
    s.Xv = derivative(0, 1);
    s.Xuu = derivative(2, 0);
    s.Xuv = derivative(1, 1);
    s.Xvv = derivative(0, 2);
    s.Xuuu = derivative(3, 0);
    s.Xuuv = derivative(2, 1);
    s.Xuvv = derivative(1, 2);
    s.Xvvv = derivative(0, 3);
    return s;
}

} // namespace nframes
