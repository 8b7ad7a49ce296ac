// curve.hpp - branch configurations, the quotient curves Y+/Y- and the double cover Sigma.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "spectral_torus/errors.hpp"
#include "spectral_torus/polynomial.hpp"

namespace spectral_torus {

enum class family_kind { odd, even };
enum class curve_sign { plus, minus };

constexpr double tol_conj = 1e-12;

// A point of M_n (odd family: r plus n conjugate-ish pairs) or its even-genus analogue.
// Branch points are stored exactly as given; everything derived is recomputed on demand.
struct branch_configuration {
    family_kind family = family_kind::odd;
    int n = 0;
    double r = 0.0;                // odd family only
    std::vector<cx> x;             // 2n entries, pairs (x_1,x_2),...,(x_{2n-1},x_{2n})
    bool real_symmetric = false;

    int sigma_genus() const { return family == family_kind::odd ? 2 * n + 1 : 2 * n; }
};

namespace detail {
inline bool conj_pair(cx a, cx b, double tol) {
    double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - std::conj(b)) <= tol * scale;
}
}  // namespace detail

inline branch_configuration build_family(family_kind family, int n, std::optional<double> r,
                                         const std::vector<cx>& x_pairs) {
    branch_configuration cfg;
    cfg.family = family;
    cfg.n = n;
    if (n < 0) throw domain_error("n must be nonnegative");
    if (family == family_kind::odd) {
        if (!r) throw domain_error("odd family requires the branch point r");
        cfg.r = *r;
        if (!(cfg.r > 2.0))
            throw domain_error("odd family requires r in (2, inf); the r < -2 branch is rejected");
    } else if (r) {
        throw domain_error("even family has no parameter r");
    }
    if (static_cast<int>(x_pairs.size()) != 2 * n)
        throw domain_error("expected " + std::to_string(2 * n) + " branch points, got " +
                           std::to_string(x_pairs.size()));
    cfg.x = x_pairs;

    for (size_t i = 0; i < cfg.x.size(); ++i) {
        if (std::abs(cfg.x[i] - 2.0) < 1e-14 || std::abs(cfg.x[i] + 2.0) < 1e-14)
            throw domain_error("branch point x_" + std::to_string(i + 1) + " coincides with +-2");
        if (family == family_kind::odd && std::abs(cfg.x[i] - cfg.r) < 1e-14)
            throw domain_error("branch point x_" + std::to_string(i + 1) + " coincides with r");
        for (size_t j = 0; j < i; ++j)
            if (std::abs(cfg.x[i] - cfg.x[j]) < 1e-14)
                throw domain_error("coincident branch points x_" + std::to_string(j + 1) + ", x_" +
                                   std::to_string(i + 1));
    }

    bool sym = true;
    for (int i = 0; i < n; ++i) {
        if (!detail::conj_pair(cfg.x[2 * i], cfg.x[2 * i + 1], tol_conj) ||
            std::abs(cfg.x[2 * i].imag()) == 0.0) {
            sym = false;
            break;
        }
    }
    cfg.real_symmetric = sym;
    return cfg;
}

// y^2 = q(x) with q monic and all roots simple; evaluation helpers live here.
struct quotient_curve {
    curve_sign sign = curve_sign::plus;
    family_kind family = family_kind::odd;
    std::vector<cx> branch;  // roots of q

    cx ysq(cx x) const {
        cx v = 1.0;
        for (cx b : branch) v *= (x - b);
        return v;
    }

    // Product of per-factor principal square roots; on the real axis to the right of all
    // branch points this is the sheet with y ~ +x^{m+1/2}.
    cx y_principal(cx x) const {
        cx v = 1.0;
        for (cx b : branch) v *= std::sqrt(x - b);
        return v;
    }

    // Relative-error amplification of evaluating ysq in doubles: each factor x - b
    // carries cancellation noise (scale + |b|) eps / |x - b|, where scale covers both
    // |x| and the length of the path segment that produced x.
    double ysq_condition(cx x, double scale) const {
        double s = std::max(scale, std::abs(x));
        double c = 1.0;
        for (cx b : branch) c += (s + std::abs(b)) / std::max(std::abs(x - b), 1e-300);
        return c;
    }

    int degree() const { return static_cast<int>(branch.size()); }
    int genus() const { return (degree() - 1) / 2; }

    double min_branch_gap() const {
        double g = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < branch.size(); ++i)
            for (size_t j = 0; j < i; ++j) g = std::min(g, std::abs(branch[i] - branch[j]));
        return g;
    }
};

inline quotient_curve make_quotient(const branch_configuration& cfg, curve_sign s) {
    quotient_curve c;
    c.sign = s;
    c.family = cfg.family;
    if (cfg.family == family_kind::odd) {
        if (s == curve_sign::minus) {
            c.branch.push_back(2.0);
            c.branch.push_back(-2.0);
        }
        c.branch.push_back(cfg.r);
    } else {
        c.branch.push_back(s == curve_sign::plus ? cx(-2.0) : cx(2.0));
    }
    for (cx xi : cfg.x) c.branch.push_back(xi);
    return c;
}

// eta^2 = P(lambda); root list closed under lambda -> 1/lambda and 1/conj(lambda).
struct sigma_curve {
    family_kind family = family_kind::odd;
    std::vector<cx> roots;  // roots of P, excluding the one at infinity if deg odd
    int genus = 0;

    cx psq(cx l) const {
        cx v = 1.0;
        for (cx z : roots) v *= (l - z);
        return v;
    }
    int degree() const { return static_cast<int>(roots.size()); }
};

// Root of lambda^2 - x lambda + 1 with |lambda| > 1.
inline cx lambda_of_x(cx x) {
    cx d = std::sqrt(x * x - 4.0);
    if (std::abs(d) < 1e-14) throw solve_error("degenerate quadratic: x = +-2");
    cx l1 = 0.5 * (x + d), l2 = 0.5 * (x - d);
    return std::abs(l1) >= std::abs(l2) ? l1 : l2;
}

inline sigma_curve assemble_sigma(const branch_configuration& cfg) {
    sigma_curve s;
    s.family = cfg.family;
    if (cfg.family == family_kind::odd) {
        s.roots.push_back(0.0);
        cx R = lambda_of_x(cfg.r);
        s.roots.push_back(R);
        s.roots.push_back(1.0 / R);
    } else {
        s.roots.push_back(0.0);
    }
    for (cx xi : cfg.x) {
        cx li = lambda_of_x(xi);
        s.roots.push_back(li);
        s.roots.push_back(1.0 / li);
    }
    s.genus = cfg.sigma_genus();
    for (cx z : s.roots)
        if (z != 0.0 && std::abs(std::abs(z) - 1.0) < 1e-12)
            throw domain_error("sigma root on the unit circle");
    return s;
}

struct symmetry_report {
    bool item1_conjugate_pairs = false;
    // Items 2-5 concern cycle and lift conventions; they are certified by the homology
    // constructions and recorded here as delegated flags.
    bool item2_a_loops_conjugation_invariant = false;
    bool item3_plus_lift_seed = false;
    bool item4_minus_lift_seed = false;
    bool item5_c_start_sheet = false;
    bool vacuous = false;
};

inline symmetry_report check_real_symmetric(const branch_configuration& cfg) {
    symmetry_report rep;
    rep.vacuous = (cfg.n == 0);
    rep.item1_conjugate_pairs = true;
    for (int i = 0; i < cfg.n; ++i)
        if (!detail::conj_pair(cfg.x[2 * i], cfg.x[2 * i + 1], tol_conj))
            rep.item1_conjugate_pairs = false;
    return rep;
}

}  // namespace spectral_torus
