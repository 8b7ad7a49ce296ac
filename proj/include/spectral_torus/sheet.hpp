// sheet.hpp - continuous square-root sheet selection along planar paths.
#pragma once

#include <complex>
#include <functional>

#include "spectral_torus/curve.hpp"
#include "spectral_torus/errors.hpp"
#include "spectral_torus/path.hpp"

namespace spectral_torus {

// Continue y with y^2 = ysq(x) from (x0, y0) to x1 along the straight segment between them,
// halving steps until the relative jump is below 1/2.
template <class YsqFn>
cx continue_branch(const YsqFn& ysq, cx x0, cx y0, cx x1, int maxdepth = 52) {
    cx root = std::sqrt(ysq(x1));
    cx cand = (std::abs(root - y0) <= std::abs(root + y0)) ? root : -root;
    if (std::abs(cand - y0) <= 0.5 * std::abs(y0)) return cand;
    if (maxdepth == 0)
        throw continuation_error("adaptive halving hit the resolution floor near a branch point");
    cx xm = 0.5 * (x0 + x1);
    cx ym = continue_branch(ysq, x0, y0, xm, maxdepth - 1);
    return continue_branch(ysq, xm, ym, x1, maxdepth - 1);
}

inline cx continue_y(const quotient_curve& c, cx x0, cx y0, cx x1) {
    return continue_branch([&](cx x) { return c.ysq(x); }, x0, y0, x1);
}

enum class seed_rule { y_over_i_negative, y_positive, explicit_value };

// A planar contour together with a starting sheet on a quotient curve.
struct sheet_path {
    const quotient_curve* curve = nullptr;
    planar_path path;
    cx y_start;

    cx y_at_end() const {
        cx y = y_start;
        cx x = path.start();
        for (const auto& s : path.segs) {
            constexpr int K = 16;
            for (int i = 1; i <= K; ++i) {
                cx xn = s.point(double(i) / K);
                y = continue_y(*curve, x, y, xn);
                x = xn;
            }
        }
        return y;
    }
};

// For conjugate-symmetric data the branch value at the seed point is purely imaginary
// (rule y/i<0) or purely real (rule y>0); off the symmetric locus the rules extend
// continuously by the sign of Im y resp. Re y.
inline cx seed_value(const quotient_curve& c, cx x, seed_rule rule, cx explicit_y = 0.0) {
    if (rule == seed_rule::explicit_value) return explicit_y;
    cx y = c.y_principal(x);
    if (rule == seed_rule::y_over_i_negative) {
        if (std::abs(y.imag()) < 1e-13 * std::abs(y))
            throw lift_error("seed rule y/i<0 is ambiguous here (branch value real)");
        return (y.imag() < 0.0) ? y : -y;
    }
    if (std::abs(y.real()) < 1e-13 * std::abs(y))
        throw lift_error("seed rule y>0 is ambiguous here (branch value imaginary)");
    return (y.real() > 0.0) ? y : -y;
}

inline sheet_path trace_sheet(const quotient_curve& c, const planar_path& p, seed_rule rule,
                              cx explicit_y = 0.0, double delta_branch = 0.0) {
    for (cx b : c.branch)
        if (p.distance_to(b) < delta_branch)
            throw geometry_error("path clearance below delta_branch");
    sheet_path sp;
    sp.curve = &c;
    sp.path = p;
    sp.y_start = seed_value(c, p.start(), rule, explicit_y);
    return sp;
}

}  // namespace spectral_torus
