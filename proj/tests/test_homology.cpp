#include <catch2/catch_amalgamated.hpp>

#include "spectral_torus/curve.hpp"
#include "spectral_torus/differentials.hpp"
#include "spectral_torus/homology.hpp"

using namespace spectral_torus;
using Catch::Approx;

namespace {
branch_configuration genus_one(double t) { return build_family(family_kind::odd, 0, 2.0 + t, {}); }
}

TEST_CASE("genus-one cycle set: windings, intersections, I_- = 8 + O(t)") {
    for (double t : {1.0, 1e-3}) {
        auto cfg = genus_one(t);
        auto Ym = make_quotient(cfg, curve_sign::minus);
        auto cs = build_cycles(cfg, Ym);
        REQUIRE(cs.a_cycles.size() == 1);
        REQUIRE(cs.b_cycles.size() == 1);

        // a_0 rings {2, r}; b_0 rings {-2, 2}; symplectic pairing +1
        CHECK(cs.a_cycles[0].winding(cx(2.0)) == 1);
        CHECK(cs.a_cycles[0].winding(cx(cfg.r)) == 1);
        CHECK(cs.a_cycles[0].winding(cx(-2.0)) == 0);
        CHECK(cs.b_cycles[0].winding(cx(cfg.r)) == 0);
        CHECK(cs.b_cycles[0].winding(cx(-2.0)) == 1);
        CHECK(intersection_number(cs.a_cycles[0], cs.b_cycles[0]) == 1);

        // Omega_-(t) = (x - zeta_0) dx / y_-, zeta_0 from the vanishing a-period
        auto Om = solve_second_kind(Ym, cs);
        REQUIRE(Om.zeta.size() == 1);
        cx apd = cs.a_cycles[0]
                     .integrate([&](cx x, cx y) { return Om.numerator.eval(x) / y; }, 1e-12)
                     .value;
        CHECK(std::abs(apd) < 1e-10);

        cx Iminus = cs.b_cycles[0]
                        .integrate([&](cx x, cx y) { return Om.numerator.eval(x) / y; }, 1e-12)
                        .value;
        CHECK(std::abs(Iminus.imag()) < 1e-9);
        if (t == 1e-3) CHECK(std::abs(Iminus.real() - 8.0) < 0.05);

        // replacing b_0 by b_0 + a_0 leaves the Omega_- period unchanged
        cycle shifted = cs.b_cycles[0];
        for (auto& [sp, w] : cs.a_cycles[0].parts) shifted.parts.emplace_back(sp, w);
        cx Ishift = shifted
                        .integrate([&](cx x, cx y) { return Om.numerator.eval(x) / y; }, 1e-12)
                        .value;
        CHECK(std::abs(Ishift - Iminus) < 1e-10);
    }
}

TEST_CASE("genus-one c-path values via the cycle builder") {
    double t = 1.0;
    auto cfg = genus_one(t);
    auto Yp = make_quotient(cfg, curve_sign::plus);
    auto cs = build_cycles(cfg, Yp);
    REQUIRE(cs.c_paths.size() == 2);
    auto Om = solve_second_kind(Yp, cs);  // n = 0: empty numerator product, Omega_+ = dx/y_+
    CHECK(Om.numerator.degree() == 0);

    cx v1 = integrate_form(cs.c_paths[0], [&](cx x, cx y) { return 1.0 / y; }, 1e-12).value;
    cx vm = integrate_form(cs.c_paths[1], [&](cx x, cx y) { return 1.0 / y; }, 1e-12).value;
    CHECK(v1.imag() == Approx(4.0 * std::sqrt(t)).epsilon(1e-9));
    CHECK(vm.imag() == Approx(4.0 * std::sqrt(4.0 + t)).epsilon(1e-9));
}

TEST_CASE("n = 1 symmetric: full symplectic certificates on both curves") {
    auto cfg = build_family(family_kind::odd, 1, 3.0, {cx(0.5, 0.7), cx(0.5, -0.7)});
    for (auto sign : {curve_sign::plus, curve_sign::minus}) {
        auto curve = make_quotient(cfg, sign);
        auto cs = build_cycles(cfg, curve);
        size_t g = cs.a_cycles.size();
        REQUIRE(g == (sign == curve_sign::plus ? 1u : 2u));
        REQUIRE(cs.b_cycles.size() == g);
        for (size_t i = 0; i < g; ++i) {
            for (size_t j = 0; j < g; ++j) {
                CHECK(intersection_number(cs.a_cycles[i], cs.b_cycles[j]) == (i == j ? 1 : 0));
                CHECK(intersection_number(cs.a_cycles[i], cs.a_cycles[j]) == 0);
                CHECK(intersection_number(cs.b_cycles[i], cs.b_cycles[j]) == 0);
            }
        }
        CHECK(cs.a_crossings_in_window);
    }
}

TEST_CASE("a-cycle lifts respect the stated seed conventions") {
    auto cfg = build_family(family_kind::odd, 1, 3.0, {cx(0.5, 0.7), cx(0.5, -0.7)});
    auto Yp = make_quotient(cfg, curve_sign::plus);
    auto Ym = make_quotient(cfg, curve_sign::minus);
    auto cp = build_a_cycles(cfg, Yp);
    auto cm = build_a_cycles(cfg, Ym);
    // pair loop starts at the upward axis crossing; y_+ / i < 0 and y_- > 0 there
    const auto& spp = cp.a_cycles[0].parts[0].first;
    CHECK(std::abs(spp.path.start().imag()) < 1e-12);
    CHECK(spp.y_start.imag() < 0.0);
    CHECK(std::abs(spp.y_start.real()) < 1e-12 * std::abs(spp.y_start));
    const auto& spm = cm.a_cycles[1].parts[0].first;
    CHECK(spm.y_start.real() > 0.0);
    CHECK(std::abs(spm.y_start.imag()) < 1e-12 * std::abs(spm.y_start));
}

TEST_CASE("even family cycles") {
    auto cfg = build_family(family_kind::even, 1, std::nullopt, {cx(0.4, 0.9), cx(0.4, -0.9)});
    for (auto sign : {curve_sign::plus, curve_sign::minus}) {
        auto curve = make_quotient(cfg, sign);
        auto cs = build_cycles(cfg, curve);
        REQUIRE(cs.a_cycles.size() == 1);
        REQUIRE(cs.b_cycles.size() == 1);
        REQUIRE(cs.c_paths.size() == 1);
        CHECK(intersection_number(cs.a_cycles[0], cs.b_cycles[0]) == 1);
        // c-path winds once around the lone non-pair branch point
        cx anchor = sign == curve_sign::plus ? cx(-2.0) : cx(2.0);
        CHECK(cs.c_paths[0].path.winding(anchor) == 1);
    }
}
