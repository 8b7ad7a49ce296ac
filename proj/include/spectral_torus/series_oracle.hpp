// series_oracle.hpp - small-t series for the genus-one a-period integrals, by expanding the
// integrand in t and integrating term by term around the collapsing pair {0, t}.
// Independent of the contour quadrature; used to cross-validate it.
#pragma once

#include <complex>
#include <vector>

#include "spectral_torus/errors.hpp"
#include "spectral_torus/polynomial.hpp"

namespace spectral_torus {

// Integrals  int_{a^-(t)} zeta^k dzeta / sqrt(zeta (zeta+4) (zeta-t)),  k = 0,1,2,
// a^-(t) the ccw loop around {0, t} with the standard Y_- lift.
//
// Expansion: (zeta-t)^{-1/2} = zeta^{-1/2} sum_m a_m (t/zeta)^m, a_m = C(2m,m)/4^m,
//            (zeta+4)^{-1/2} = sum_l b_l zeta^l,                 b_l = C(2l,l)(-1/16)^l / 2,
// and the loop integral picks 2*pi*i times the zeta^{-1} coefficient:
//   c_k(t) = 2 pi i * sum_{m >= k} a_m b_{m-k} t^m.
struct a_period_series {
    // coefficient of t^m in the k-th integral, divided by (2 pi i)
    std::vector<std::vector<double>> coeff;  // coeff[k][m]
    double t_max;

    cx eval(int k, double t) const {
        cx s = 0.0;
        double tm = 1.0;
        for (double c : coeff[k]) {
            s += c * tm;
            tm *= t;
        }
        return cx(0.0, 2.0 * M_PI) * s;
    }
};

inline a_period_series series_oracle_a_period(double t, double t_max = 0.1, int terms = 64) {
    if (!(t > 0.0) || t >= t_max)
        throw convergence_error("series oracle requires 0 < t < t_max");
    a_period_series s;
    s.t_max = t_max;
    std::vector<double> a(terms), b(terms);
    a[0] = 1.0;
    b[0] = 0.5;
    for (int m = 1; m < terms; ++m) {
        // C(2m,m)/4^m satisfies ratio (2m-1)/(2m)
        a[m] = a[m - 1] * (2.0 * m - 1.0) / (2.0 * m);
        b[m] = -b[m - 1] * (2.0 * m - 1.0) / (2.0 * m) / 4.0;
    }
    s.coeff.assign(3, {});
    for (int k = 0; k <= 2; ++k) {
        s.coeff[k].assign(terms, 0.0);
        for (int m = k; m < terms; ++m) s.coeff[k][m] = a[m] * b[m - k];
    }
    return s;
}

}  // namespace spectral_torus
