// quadrature.hpp - adaptive composite Gauss-Legendre along tracked contours.
#pragma once

#include <complex>
#include <functional>

#include "spectral_torus/gauss.hpp"
#include "spectral_torus/path.hpp"
#include "spectral_torus/sheet.hpp"

namespace spectral_torus {

struct quadrature_result {
    cx value;
    double error_estimate = 0.0;
    long nodes_used = 0;
};

constexpr double default_tol_quad = 1e-10;

namespace detail {

// One Gauss pass over segment parameter range [s0,s1]; y continued through the nodes in
// order.  `noise` accumulates the double-precision evaluation noise of the sum, driven
// by the cancellation condition of the curve evaluation.
template <class YsqFn, class CondFn, class Integrand>
cx gauss_pass(const YsqFn& ysq, const CondFn& cond, const segment& seg, double s0, double s1,
              cx y_in, const gauss_rule& g, const Integrand& f, cx& y_out, long& nodes,
              double& noise) {
    cx tot = 0.0;
    double mass = 0.0;
    double segscale = std::max({std::abs(seg.point(0.0)), std::abs(seg.point(1.0)),
                                seg.length()});
    cx y = y_in;
    cx xprev = seg.point(s0);
    for (size_t i = 0; i < g.x.size(); ++i) {
        double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * g.x[i];
        cx x = seg.point(s);
        y = continue_branch(ysq, xprev, y, x);
        xprev = x;
        cx term = f(x, y) * seg.deriv(s);
        tot += g.w[i] * term;
        mass += g.w[i] * std::abs(term) * (1.0 + 0.5 * cond(x, segscale));
        ++nodes;
    }
    y_out = continue_branch(ysq, xprev, y, seg.point(s1));
    noise += 0.5 * std::abs(s1 - s0) * mass * 1.2e-16;
    return 0.5 * (s1 - s0) * tot;
}

template <class YsqFn, class CondFn, class Integrand>
cx adaptive_segment(const YsqFn& ysq, const CondFn& cond, const segment& seg, double s0,
                    double s1, cx y_in, const Integrand& f, double tol, int depth, cx& y_out,
                    double& err, long& nodes) {
    double ncoarse = 0.0, nfine = 0.0;
    cx ycoarse_out;
    cx coarse = gauss_pass(ysq, cond, seg, s0, s1, y_in, gauss32(), f, ycoarse_out, nodes, ncoarse);
    double sm = 0.5 * (s0 + s1);
    cx ymid;
    cx a = gauss_pass(ysq, cond, seg, s0, sm, y_in, gauss32(), f, ymid, nodes, nfine);
    cx yfine_out;
    cx b = gauss_pass(ysq, cond, seg, sm, s1, ymid, gauss32(), f, yfine_out, nodes, nfine);
    double diff = std::abs(coarse - (a + b));
    // tolerance floored at the evaluation-noise scale of the pieces
    double floor = 4.0 * (ncoarse + nfine) + 2e-15 * (std::abs(a) + std::abs(b));
    if (diff <= std::max(tol, floor) || depth >= 26) {
        if (depth >= 26 && diff > std::max(tol, floor) * 32)
            throw max_refinement_error("quadrature refinement cap reached");
        y_out = yfine_out;
        err += std::max(diff, floor);
        return a + b;
    }
    cx left =
        adaptive_segment(ysq, cond, seg, s0, sm, y_in, f, 0.5 * tol, depth + 1, ymid, err, nodes);
    cx right =
        adaptive_segment(ysq, cond, seg, sm, s1, ymid, f, 0.5 * tol, depth + 1, y_out, err, nodes);
    return left + right;
}

}  // namespace detail

// Integrate f(x, y) dx along a tracked path.  The integrand may be any function of the
// point; rational integrands must keep their poles off the path (checked by the caller
// via clearances).
template <class Integrand>
quadrature_result integrate_form(const sheet_path& sp, const Integrand& f,
                                 double tol = default_tol_quad) {
    quadrature_result res;
    cx y = sp.y_start;
    const auto ysq = [&](cx x) { return sp.curve->ysq(x); };
    const auto cond = [&](cx x, double s) { return sp.curve->ysq_condition(x, s); };
    double tol_per = tol / std::max<size_t>(1, sp.path.segs.size());
    for (const auto& seg : sp.path.segs) {
        cx y_out;
        res.value += detail::adaptive_segment(ysq, cond, seg, 0.0, 1.0, y, f, tol_per, 0, y_out,
                                              res.error_estimate, res.nodes_used);
        y = y_out;
    }
    return res;
}

// Same machinery for an arbitrary square-root field (used for the sigma cover where
// eta^2 = P(lambda) along lambda-plane paths).
template <class YsqFn, class CondFn, class Integrand>
quadrature_result integrate_tracked(const YsqFn& ysq, const CondFn& cond,
                                    const planar_path& path, cx y_seed, const Integrand& f,
                                    double tol = default_tol_quad) {
    quadrature_result res;
    cx y = y_seed;
    double tol_per = tol / std::max<size_t>(1, path.segs.size());
    for (const auto& seg : path.segs) {
        cx y_out;
        res.value += detail::adaptive_segment(ysq, cond, seg, 0.0, 1.0, y, f, tol_per, 0, y_out,
                                              res.error_estimate, res.nodes_used);
        y = y_out;
    }
    return res;
}

}  // namespace spectral_torus
