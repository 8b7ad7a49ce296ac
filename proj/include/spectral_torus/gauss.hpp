// gauss.hpp - Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration.
#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace spectral_torus {

struct gauss_rule {
    std::vector<double> x, w;
};

inline gauss_rule make_gauss_rule(int n) {
    gauss_rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        r.x[i] = t;
        r.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return r;
}

inline const gauss_rule& gauss16() {
    static const gauss_rule r = make_gauss_rule(16);
    return r;
}

inline const gauss_rule& gauss32() {
    static const gauss_rule r = make_gauss_rule(32);
    return r;
}

}  // namespace spectral_torus
