#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "spectral_torus/curve.hpp"
#include "spectral_torus/path.hpp"
#include "spectral_torus/quadrature.hpp"
#include "spectral_torus/series_oracle.hpp"
#include "spectral_torus/sheet.hpp"

using namespace spectral_torus;
using Catch::Approx;

TEST_CASE("winding certificates") {
    auto loop = stadium_loop(cx(2.0), cx(3.0), 0.3);
    CHECK(loop.winding(cx(2.0)) == 1);
    CHECK(loop.winding(cx(3.0)) == 1);
    CHECK(loop.winding(cx(-2.0)) == 0);
    CHECK(loop.winding(cx(2.5, 2.0)) == 0);
    auto rev = loop.reversed();
    CHECK(rev.winding(cx(2.5)) == -1);
}

TEST_CASE("residue theorem on a degenerate curve") {
    // y = 1 identically: integrate dx/x over |x| = 1 ccw
    quotient_curve unit;  // empty branch list -> ysq = 1
    auto circle = circle_loop(cx(0.0), 1.0);
    sheet_path sp = trace_sheet(unit, circle, seed_rule::explicit_value, cx(1.0));
    auto r = integrate_form(sp, [](cx x, cx) { return 1.0 / x; }, 1e-13);
    CHECK(std::abs(r.value - cx(0.0, 2 * M_PI)) < 1e-12);
}

TEST_CASE("sheet monodromy parity") {
    quotient_curve c;
    c.branch = {cx(3.0)};
    auto loop = circle_loop(cx(3.0), 0.5);
    sheet_path sp = trace_sheet(c, loop, seed_rule::explicit_value, c.y_principal(cx(3.5)));
    cx yend = sp.y_at_end();
    CHECK(std::abs(yend + sp.y_start) < 1e-12 * std::abs(sp.y_start));  // one flip

    quotient_curve c2;
    c2.branch = {cx(3.0), cx(-1.0)};
    auto loop2 = stadium_loop(cx(-1.0), cx(3.0), 0.7);
    sheet_path sp2 = trace_sheet(c2, loop2, seed_rule::explicit_value,
                                 c2.y_principal(loop2.start()));
    CHECK(std::abs(sp2.y_at_end() - sp2.y_start) < 1e-12 * std::abs(sp2.y_start));  // two flips
}

TEST_CASE("sheet parity law on randomized loops") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    quotient_curve c;
    c.branch = {cx(1.0, 0.3), cx(-0.8, -0.4), cx(0.2, 1.4)};
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<int> mask(3);
        int total = 0;
        for (int k = 0; k < 3; ++k) {
            mask[k] = (rng() >> 3) & 1;
            total += mask[k];
        }
        if (total == 0) continue;
        // loop = product of small circles around chosen branch points, connected via hub
        cx hub = cx(4.0, 2.0 + U(rng));
        planar_path p;
        cx cur = hub;
        for (int k = 0; k < 3; ++k) {
            if (!mask[k]) continue;
            double ang = std::arg(cur - c.branch[k]);
            cx entry = c.branch[k] + 0.2 * std::polar(1.0, ang);
            p.append(segment::line(cur, entry));
            p.append(segment::arc(c.branch[k], 0.2, ang, ang + 2 * M_PI));
            p.append(segment::line(entry, cur));
        }
        sheet_path sp = trace_sheet(c, p, seed_rule::explicit_value, c.y_principal(hub));
        cx yend = sp.y_at_end();
        if (total % 2 == 0)
            CHECK(std::abs(yend - sp.y_start) < 1e-10 * std::abs(sp.y_start));
        else
            CHECK(std::abs(yend + sp.y_start) < 1e-10 * std::abs(sp.y_start));
    }
}

TEST_CASE("orientation antisymmetry and linearity") {
    quotient_curve c;
    c.branch = {cx(1.0), cx(-1.0), cx(0.0, 2.0)};
    auto loop = stadium_loop(cx(-1.0), cx(1.0), 0.4);
    sheet_path sp = trace_sheet(c, loop, seed_rule::explicit_value, c.y_principal(loop.start()));
    auto rev = loop.reversed();
    sheet_path spr = trace_sheet(c, rev, seed_rule::explicit_value, sp.y_at_end());

    auto f = [](cx x, cx y) { return (x * x + 2.0) / y; };
    cx a = integrate_form(sp, f, 1e-12).value;
    cx b = integrate_form(spr, f, 1e-12).value;
    CHECK(std::abs(a + b) < 1e-10);

    // linearity in the numerator
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    cx alpha(U(rng), U(rng)), beta(U(rng), U(rng));
    auto f1 = [](cx x, cx y) { return 1.0 / y; };
    auto f2 = [](cx x, cx y) { return x / y; };
    auto fc = [&](cx x, cx y) { return (alpha + beta * x) / y; };
    cx v1 = integrate_form(sp, f1, 1e-13).value;
    cx v2 = integrate_form(sp, f2, 1e-13).value;
    cx vc = integrate_form(sp, fc, 1e-13).value;
    CHECK(std::abs(vc - (alpha * v1 + beta * v2)) < 1e-11 * (1.0 + std::abs(vc)));
}

TEST_CASE("deformation invariance") {
    quotient_curve c;
    c.branch = {cx(1.0, 0.5), cx(1.0, -0.5), cx(4.0)};
    auto f = [](cx x, cx y) { return x / y; };
    auto l1 = stadium_loop(cx(1.0, -0.5), cx(1.0, 0.5), 0.3);
    auto l2 = stadium_loop(cx(1.0, -0.5), cx(1.0, 0.5), 0.8);
    sheet_path s1 = trace_sheet(c, l1, seed_rule::explicit_value, c.y_principal(l1.start()));
    // seed l2 by continuing from l1's start point to l2's start point
    cx y2 = continue_y(c, l1.start(), s1.y_start, l2.start());
    sheet_path s2 = trace_sheet(c, l2, seed_rule::explicit_value, y2);
    cx v1 = integrate_form(s1, f, 1e-12).value;
    cx v2 = integrate_form(s2, f, 1e-12).value;
    CHECK(std::abs(v1 - v2) < 1e-10);
}

TEST_CASE("genus-one c-path integrals at t = 1") {
    // Y+(t): y^2 = x - r, r = 3; c_1 from x=2 around r; c_{-1} from x=-2 around r
    double r = 3.0;
    quotient_curve Yp;
    Yp.branch = {cx(r)};
    planar_path c1 = lasso_path(cx(2.0), cx(r), 0.25);
    sheet_path sp = trace_sheet(Yp, c1, seed_rule::y_over_i_negative);
    cx v = integrate_form(sp, [](cx x, cx y) { return 1.0 / y; }, 1e-12).value;
    CHECK(v.imag() == Approx(4.0).epsilon(1e-10));  // modulus 4 sqrt(t), t = 1
    CHECK(std::abs(v.real()) < 1e-10);

    planar_path cm1 = lasso_path(cx(-2.0), cx(r), 0.25);
    sheet_path spm = trace_sheet(Yp, cm1, seed_rule::y_over_i_negative);
    cx vm = integrate_form(spm, [](cx x, cx y) { return 1.0 / y; }, 1e-12).value;
    CHECK(vm.imag() == Approx(4.0 * std::sqrt(5.0)).epsilon(1e-10));

    // reversing the start sheet negates the integral
    sheet_path spf = trace_sheet(Yp, c1, seed_rule::explicit_value, -sp.y_start);
    cx vf = integrate_form(spf, [](cx x, cx y) { return 1.0 / y; }, 1e-12).value;
    CHECK(std::abs(vf + v) < 1e-10);
}

TEST_CASE("series oracle vs quadrature for the a-period integrals") {
    // loop around {0, t} on y^2 = zeta (zeta+4) (zeta-t), seeded with y > 0 at the
    // right upward crossing (the standard a^- lift)
    for (double t : {1e-2, 5e-3, 1e-3}) {
        quotient_curve Ym;
        Ym.branch = {cx(0.0), cx(-4.0), cx(t)};
        planar_path loop;
        double clr = 0.35 * t;
        loop.closed = true;
        loop.append(segment::arc(cx(t), clr, 0, M_PI / 2));
        loop.append(segment::line(cx(t, clr), cx(0.0, clr)));
        loop.append(segment::arc(cx(0.0), clr, M_PI / 2, 3 * M_PI / 2));
        loop.append(segment::line(cx(0.0, -clr), cx(t, -clr)));
        loop.append(segment::arc(cx(t), clr, -M_PI / 2, 0));
        sheet_path sp = trace_sheet(Ym, loop, seed_rule::y_positive);

        auto oracle = series_oracle_a_period(t);
        for (int k = 0; k <= 2; ++k) {
            cx quad = integrate_form(sp, [k](cx x, cx y) { return std::pow(x, k) / y; },
                                     1e-13).value;
            cx ser = oracle.eval(k, t);
            CHECK(std::abs(quad - ser) <= 10.0 * t * t);
        }
        // leading coefficients of the oracle itself
        CHECK(oracle.coeff[0][0] == Approx(0.5));           // pi*i
        CHECK(oracle.coeff[0][1] == Approx(-1.0 / 32.0));   // -(pi*i/16) t
        CHECK(oracle.coeff[1][1] == Approx(0.25));          // (pi*i/2) t
        CHECK(std::abs(oracle.coeff[2][0]) < 1e-15);
        CHECK(std::abs(oracle.coeff[2][1]) < 1e-15);
    }
    CHECK_THROWS_AS(series_oracle_a_period(0.5), convergence_error);
}

TEST_CASE("make_loop and clearance validation") {
    std::vector<cx> branch = {cx(2.0), cx(3.0), cx(0.5, 0.7), cx(0.5, -0.7)};
    auto loop = make_loop(branch, {0, 1});
    CHECK(loop.winding(cx(2.0)) == 1);
    CHECK(loop.winding(cx(3.0)) == 1);
    CHECK(loop.winding(cx(0.5, 0.7)) == 0);
    // the crossing beyond r and before 2: stadium around [2,3] crosses in (-inf,2) and (3,inf)
    CHECK(loop.start().real() > 3.0);

    auto pairloop = make_loop(branch, {2, 3});
    CHECK(pairloop.winding(cx(0.5, 0.7)) == 1);
    CHECK(pairloop.winding(cx(0.5, -0.7)) == 1);
    CHECK(pairloop.winding(cx(2.0)) == 0);
    // conjugation-symmetric with both axis crossings in (-2, 2)
    double xc = pairloop.start().real();
    CHECK(std::abs(pairloop.start().imag()) < 1e-12);
    CHECK(xc > -2.0);
    CHECK(xc < 2.0);

    CHECK_THROWS_AS(make_loop(branch, {}), geometry_error);

    quotient_curve c;
    c.branch = {cx(1.0)};
    auto tight = circle_loop(cx(1.0), 0.2);
    CHECK_THROWS_AS(trace_sheet(c, tight, seed_rule::explicit_value, cx(1.0), 0.5),
                    geometry_error);
}
