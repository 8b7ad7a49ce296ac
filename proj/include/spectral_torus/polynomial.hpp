// polynomial.hpp - dense complex polynomials and root extraction.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <vector>

#include "spectral_torus/errors.hpp"

namespace spectral_torus {

using cx = std::complex<double>;

// Coefficients ascending: c[0] + c[1] x + ... + c[n] x^n.
struct poly {
    std::vector<cx> c;

    poly() = default;
    explicit poly(std::vector<cx> coeffs) : c(std::move(coeffs)) { trim(); }

    static poly from_roots(const std::vector<cx>& roots) {
        poly p;
        p.c = {cx(1.0)};
        for (cx r : roots) {
            std::vector<cx> q(p.c.size() + 1, cx(0.0));
            for (size_t i = 0; i < p.c.size(); ++i) {
                q[i] -= r * p.c[i];
                q[i + 1] += p.c[i];
            }
            p.c = std::move(q);
        }
        return p;
    }

    int degree() const { return static_cast<int>(c.size()) - 1; }

    cx eval(cx x) const {
        cx v = 0.0;
        for (size_t i = c.size(); i-- > 0;) v = v * x + c[i];
        return v;
    }

    cx eval_deriv(cx x) const {
        cx v = 0.0;
        for (size_t i = c.size(); i-- > 1;) v = v * x + double(i) * c[i];
        return v;
    }

    poly derivative() const {
        if (c.size() <= 1) return poly{{cx(0.0)}};
        std::vector<cx> d(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) d[i - 1] = double(i) * c[i];
        return poly(std::move(d));
    }

    void trim() {
        while (c.size() > 1 && std::abs(c.back()) == 0.0) c.pop_back();
    }
};

inline poly operator*(const poly& a, const poly& b) {
    std::vector<cx> r(a.c.size() + b.c.size() - 1, cx(0.0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return poly(std::move(r));
}

// Companion-matrix eigenvalues plus Newton polish.
inline std::vector<cx> poly_roots(const poly& p) {
    poly q = p;
    q.trim();
    int n = q.degree();
    if (n <= 0) return {};
    if (n == 1) return {-q.c[0] / q.c[1]};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) C(i, n - 1) = -q.c[i] / q.c[n];
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success)
        throw root_finding_error("companion eigenvalue iteration failed");
    std::vector<cx> roots(n);
    for (int i = 0; i < n; ++i) {
        cx z = es.eigenvalues()(i);
        for (int it = 0; it < 40; ++it) {
            cx f = q.eval(z), df = q.eval_deriv(z);
            if (std::abs(df) == 0.0) break;
            cx dz = f / df;
            z -= dz;
            if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z))) break;
        }
        roots[i] = z;
    }
    std::sort(roots.begin(), roots.end(), [](cx a, cx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return roots;
}

}  // namespace spectral_torus
