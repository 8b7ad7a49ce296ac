#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "spectral_torus/curve.hpp"
#include "spectral_torus/differentials.hpp"
#include "spectral_torus/homology.hpp"

using namespace spectral_torus;
using Catch::Approx;

namespace {

struct pipeline {
    branch_configuration cfg;
    quotient_curve curve;
    cycle_set cs;
    second_kind_differential Om;
};

pipeline make(double t, curve_sign sg) {
    pipeline p;
    p.cfg = build_family(family_kind::odd, 0, 2.0 + t, {});
    p.curve = make_quotient(p.cfg, sg);
    p.cs = build_cycles(p.cfg, p.curve);
    p.Om = solve_second_kind(p.curve, p.cs, 1e-12);
    return p;
}

// independent oracle for the genus-one numerator root: collapse the a-loop onto the cut
// [0, t] in zeta = x - 2 coordinates and take the 1/|y|-weighted mean of zeta by
// trapezoid quadrature with endpoint substitution zeta = t sin^2(phi)
double s_oracle(double t) {
    const int N = 20000;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < N; ++k) {
        double phi = (k + 0.5) * M_PI / (2.0 * N);
        double z = t * std::sin(phi) * std::sin(phi);
        double w = 1.0 / std::sqrt(z + 4.0);  // the sqrt(z (t - z)) factor cancels
        num += z * w;
        den += w;
    }
    return num / den;
}

}  // namespace

TEST_CASE("genus-one Omega_- numerator root matches the segment oracle") {
    for (double t : {1.0, 1e-2}) {
        auto p = make(t, curve_sign::minus);
        double s = p.Om.zeta[0].real() - 2.0;  // zeta coordinates
        CHECK(std::abs(p.Om.zeta[0].imag()) < 1e-10);
        CHECK(s == Approx(s_oracle(t)).epsilon(1e-6));
        // s(t) = t/2 + O(t^2)
        if (t == 1e-2) CHECK(std::abs(s - t / 2) < t * t);
    }
}

TEST_CASE("solved differentials re-satisfy their defining systems") {
    auto cfg = build_family(family_kind::odd, 1, 3.0, {cx(0.5, 0.7), cx(0.5, -0.7)});
    for (auto sg : {curve_sign::plus, curve_sign::minus}) {
        auto curve = make_quotient(cfg, sg);
        auto cs = build_cycles(cfg, curve);
        auto Om = solve_second_kind(curve, cs, 1e-12);
        CHECK(Om.numerator.degree() == (sg == curve_sign::plus ? 1 : 2));
        CHECK(Om.solve_residual < 1e-10);
        for (const auto& ac : cs.a_cycles) {
            cx v = ac.integrate([&](cx x, cx y) { return Om.density(x, y); }, 1e-12).value;
            CHECK(std::abs(v) < 1e-10);
        }
    }
}

TEST_CASE("large-circle residue check: no residue at infinity") {
    auto cfg = build_family(family_kind::odd, 1, 3.0, {cx(0.5, 0.7), cx(0.5, -0.7)});
    auto curve = make_quotient(cfg, curve_sign::plus);
    auto cs = build_cycles(cfg, curve);
    auto Om = solve_second_kind(curve, cs, 1e-12);
    for (double lam : {30.0, 120.0, 480.0}) {
        double res = residue_at_infinity(
            curve, [&](cx x, cx y) { return Om.density(x, y); }, lam, 1e-12);
        CHECK(res < std::max(1e-9, 2.0 / std::sqrt(lam)));
    }
    // a density with an engineered residue is caught
    double bad = residue_at_infinity(
        curve, [&](cx x, cx y) { return Om.density(x, y) + 1.0 / x; }, 120.0, 1e-12);
    CHECK(bad == Approx(2.0).epsilon(1e-8));
}

TEST_CASE("D by series and closed form; genus-one limits D+ -> 1, D- -> -1") {
    for (double t : {1e-2, 1e-3}) {
        auto pp = make(t, curve_sign::plus);
        auto zp = extract_zeta_and_D(pp.Om, pp.cfg);
        CHECK(zp.D_series.real() == Approx((2.0 + t) / 2.0).epsilon(1e-6));  // r/2 exactly
        CHECK(std::abs(zp.D_series - zp.D_closed) < 1e-6);                   // n = 0: they agree
        CHECK(std::abs(zp.D_series.real() - 1.0) < 0.01);

        auto pm = make(t, curve_sign::minus);
        auto zm = extract_zeta_and_D(pm.Om, pm.cfg);
        CHECK(std::abs(zm.D_series.real() + 1.0) < 0.01);
        CHECK(std::abs(zm.D_series - zm.D_closed) < 1e-6);
    }
}

TEST_CASE("closed-form D disagrees with the series for n >= 1 by half the branch sum") {
    // the u-expansion gives (r + sum x_i)/2 - sum zeta_j
    auto cfg = build_family(family_kind::odd, 1, 3.0, {cx(0.5, 0.7), cx(0.5, -0.7)});
    auto curve = make_quotient(cfg, curve_sign::plus);
    auto cs = build_cycles(cfg, curve);
    auto Om = solve_second_kind(curve, cs, 1e-12);
    auto z = extract_zeta_and_D(Om, cfg);
    cx sum_x = cfg.x[0] + cfg.x[1];
    CHECK(std::abs(z.D_series - z.D_closed) == Approx(std::abs(0.5 * sum_x)).epsilon(1e-5));
}

TEST_CASE("c coefficients: genus-one c_-(t) = O(t^2), empty system for Omega_+") {
    for (double t : {1.0, 1e-2}) {
        auto pm = make(t, curve_sign::minus);
        auto c = solve_c_coeffs(pm.Om, pm.cs, 1e-12);
        REQUIRE(c.size() == 1);
        if (t == 1e-2) CHECK(std::abs(c[0]) < 1e-3);
        // re-check the defining equation
        cx z0 = pm.Om.zeta[0];
        cx lhs = 1.5 * pm.cs.a_cycles[0]
                           .integrate([&](cx x, cx y) { return x * pm.Om.numerator.eval(x) / y; },
                                      1e-12)
                           .value +
                 c[0] * pm.cs.a_cycles[0]
                            .integrate(
                                [&](cx x, cx y) { return pm.Om.numerator.eval(x) / ((x - z0) * y); },
                                1e-12)
                            .value;
        CHECK(std::abs(lhs) < 1e-10);

        auto pp = make(t, curve_sign::plus);
        CHECK(solve_c_coeffs(pp.Om, pp.cs, 1e-12).empty());
    }
    // c_-(t) ~ -(3/16) t^2
    auto pm = make(1e-2, curve_sign::minus);
    auto c = solve_c_coeffs(pm.Om, pm.cs, 1e-12);
    CHECK(c[0].real() == Approx(-3.0 / 16.0 * 1e-4).epsilon(0.05));
}

TEST_CASE("hat differentials: vanishing a-periods and the genus-one closed form") {
    double t = 1.0;
    auto pm = make(t, curve_sign::minus);
    auto c = solve_c_coeffs(pm.Om, pm.cs, 1e-12);
    auto hat = build_hat_omega(pm.Om, c);
    for (const auto& ac : pm.cs.a_cycles) {
        cx v = ac.integrate([&](cx x, cx y) { return hat.density(x, y); }, 1e-12).value;
        CHECK(std::abs(v) < 1e-10);
    }

    // genus one: hat Omega_+ = (3/2) x Omega_+; c-integrals evaluate by antiderivative
    auto pp = make(t, curve_sign::plus);
    auto hatp = build_hat_omega(pp.Om, {});
    cx v1 = integrate_form(pp.cs.c_paths[0], [&](cx x, cx y) { return hatp.density(x, y); },
                           1e-12).value;
    cx vm = integrate_form(pp.cs.c_paths[1], [&](cx x, cx y) { return hatp.density(x, y); },
                           1e-12).value;
    // antiderivative y^3 + 3 r y between (2, -i sqrt(t)) and (2, +i sqrt(t)):
    // Ihat_+ = (12 sqrt(t) + 4 t^{3/2}, (4t+4) sqrt(4+t))
    CHECK(v1.imag() == Approx(12 * std::sqrt(t) + 4 * std::pow(t, 1.5)).epsilon(1e-9));
    CHECK(vm.imag() == Approx((4 * t + 4) * std::sqrt(4 + t)).epsilon(1e-9));
}

TEST_CASE("coincident zeta roots are rejected") {
    auto pm = make(1.0, curve_sign::minus);
    auto Om = pm.Om;
    Om.zeta = {cx(2.3), cx(2.3)};
    CHECK_THROWS_AS(solve_c_coeffs(Om, pm.cs, 1e-12), coincident_zeta_error);
}

TEST_CASE("normalized holomorphic differential and reciprocity at genus 2") {
    // Y+(p, mu, nu): genus-2 smooth curve; reciprocity int_{b_2} Omega_+ = 4 kappa
    double r = 3.0, mu = 12.0, nu = 0.8;
    auto cfg = build_family(family_kind::odd, 1, r, {cx(mu, nu), cx(mu, -nu)});
    auto Yp = make_quotient(cfg, curve_sign::plus);
    auto cs = build_cycles(cfg, Yp);
    auto w = solve_normalized_holomorphic(Yp, cs, 1e-12);
    CHECK(w.solve_residual < 1e-10);
    auto Om = solve_second_kind(Yp, cs, 1e-12);
    cx per = cs.b_cycles.back()
                 .integrate([&](cx x, cx y) { return Om.density(x, y); }, 1e-12)
                 .value;
    CHECK(std::abs(per - 4.0 * w.kappa) < 1e-8);
}

TEST_CASE("scaling covariance of periods") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> U(0.5, 2.0);
    auto pm = make(0.7, curve_sign::minus);
    cx scale(U(rng), U(rng));
    cx base = pm.cs.b_cycles[0]
                  .integrate([&](cx x, cx y) { return pm.Om.numerator.eval(x) / y; }, 1e-12)
                  .value;
    cx scaled = pm.cs.b_cycles[0]
                    .integrate(
                        [&](cx x, cx y) { return scale * pm.Om.numerator.eval(x) / y; }, 1e-12)
                    .value;
    CHECK(std::abs(scaled - scale * base) < 1e-11 * std::abs(scaled));
}
