// period_map.hpp - the vectors I_+/-, their hatted companions, the projective map phi,
// its Jacobian, the delta/chi/xi decomposition and the Moebius transformation T_p.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "spectral_torus/curve.hpp"
#include "spectral_torus/differentials.hpp"
#include "spectral_torus/homology.hpp"
#include "spectral_torus/parallel.hpp"

namespace spectral_torus {

struct tolerances {
    double tol_quad = default_tol_quad;
    double tol_real = 1e-9;
    double tol_int = 1e-6;
    double tol_newton = 1e-10;
    double h_fd = 1e-5;
};

struct period_entry {
    std::string cycle;
    std::string differential;
    cx raw;
    double value;  // real extraction
};

struct period_vector {
    std::vector<double> plus, minus;
    std::vector<period_entry> provenance;
    double imag_residual = 0.0;

    std::vector<double> concat() const {
        std::vector<double> v = plus;
        v.insert(v.end(), minus.begin(), minus.end());
        return v;
    }
};

// Everything derived from one configuration: curves, cycles, differentials.
struct curve_system {
    branch_configuration cfg;
    quotient_curve Yp, Ym;
    cycle_set cyc_p, cyc_m;
    second_kind_differential Om_p, Om_m;
    tolerances tol;

    explicit curve_system(const branch_configuration& c, tolerances t = {})
        : cfg(c), tol(t) {
        Yp = make_quotient(cfg, curve_sign::plus);
        Ym = make_quotient(cfg, curve_sign::minus);
        cyc_p = build_cycles(cfg, Yp);
        cyc_m = build_cycles(cfg, Ym);
        Om_p = solve_second_kind(Yp, cyc_p, tol.tol_quad);
        Om_m = solve_second_kind(Ym, cyc_m, tol.tol_quad);
    }
};

namespace detail {

// Extraction conventions.  Odd family: raw b/c integrals of Omega_+ are purely imaginary
// on the symmetric locus, so I_+ keeps Im; Omega_- periods are real, I_- keeps Re.
// Even family mirrors this with the sqrt(+-1) prefactors of the even-genus construction.
inline void push_entry(period_vector& I, bool to_plus, bool take_im, const std::string& cyc,
                       const std::string& diff, cx raw) {
    period_entry e{cyc, diff, raw, take_im ? raw.imag() : raw.real()};
    (to_plus ? I.plus : I.minus).push_back(e.value);
    I.imag_residual = std::max(I.imag_residual, take_im ? std::abs(raw.real()) : std::abs(raw.imag()));
    I.provenance.push_back(std::move(e));
}

}  // namespace detail

template <class DensityP, class DensityM>
period_vector assemble_period_vector(const curve_system& S, const DensityP& fp, const DensityM& fm,
                                     const std::string& tag) {
    period_vector I;
    bool odd = S.cfg.family == family_kind::odd;
    if (odd) {
        for (size_t k = 0; k < S.cyc_p.c_paths.size(); ++k)
            detail::push_entry(I, true, true, S.cyc_p.c_names[k], tag,
                               integrate_form(S.cyc_p.c_paths[k], fp, S.tol.tol_quad).value);
        for (size_t k = 0; k < S.cyc_p.b_cycles.size(); ++k)
            detail::push_entry(I, true, true, S.cyc_p.b_names[k], tag,
                               S.cyc_p.b_cycles[k].integrate(fp, S.tol.tol_quad).value);
        for (size_t k = 0; k < S.cyc_m.b_cycles.size(); ++k)
            detail::push_entry(I, false, false, S.cyc_m.b_names[k], tag,
                               S.cyc_m.b_cycles[k].integrate(fm, S.tol.tol_quad).value);
    } else {
        for (size_t k = 0; k < S.cyc_p.c_paths.size(); ++k)
            detail::push_entry(I, true, false, S.cyc_p.c_names[k], tag,
                               integrate_form(S.cyc_p.c_paths[k], fp, S.tol.tol_quad).value);
        for (size_t k = 0; k < S.cyc_p.b_cycles.size(); ++k)
            detail::push_entry(I, true, false, S.cyc_p.b_names[k], tag,
                               S.cyc_p.b_cycles[k].integrate(fp, S.tol.tol_quad).value);
        for (size_t k = 0; k < S.cyc_m.c_paths.size(); ++k)
            detail::push_entry(I, false, true, S.cyc_m.c_names[k], tag,
                               integrate_form(S.cyc_m.c_paths[k], fm, S.tol.tol_quad).value);
        for (size_t k = 0; k < S.cyc_m.b_cycles.size(); ++k)
            detail::push_entry(I, false, true, S.cyc_m.b_names[k], tag,
                               S.cyc_m.b_cycles[k].integrate(fm, S.tol.tol_quad).value);
    }
    return I;
}

inline period_vector compute_I(const curve_system& S) {
    return assemble_period_vector(
        S, [&](cx x, cx y) { return S.Om_p.density(x, y); },
        [&](cx x, cx y) { return S.Om_m.density(x, y); }, "omega");
}

inline period_vector compute_hat_I(const curve_system& S) {
    auto cp = solve_c_coeffs(S.Om_p, S.cyc_p, S.tol.tol_quad);
    auto cm = solve_c_coeffs(S.Om_m, S.cyc_m, S.tol.tol_quad);
    auto Hp = build_hat_omega(S.Om_p, cp);
    auto Hm = build_hat_omega(S.Om_m, cm);
    return assemble_period_vector(
        S, [&](cx x, cx y) { return Hp.density(x, y); },
        [&](cx x, cx y) { return Hm.density(x, y); }, "omega_hat");
}

// ---------------------------------------------------------------------------
// phi and its Jacobian over the symmetric slice
// ---------------------------------------------------------------------------

struct projective_point {
    std::vector<double> homogeneous;
    int chart = 0;  // index of the normalizing coordinate

    std::vector<double> chart_coords() const {
        std::vector<double> c;
        for (size_t i = 0; i < homogeneous.size(); ++i)
            if (static_cast<int>(i) != chart) c.push_back(homogeneous[i] / homogeneous[chart]);
        return c;
    }
};

inline projective_point projectivize(const std::vector<double>& v) {
    projective_point p;
    p.homogeneous = v;
    double best = 0.0;
    for (size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            p.chart = static_cast<int>(i);
        }
    if (best == 0.0) throw zero_vector_error("period vector vanishes identically");
    return p;
}

struct phi_value {
    projective_point plus, minus;
};

inline phi_value phi(const curve_system& S) {
    period_vector I = compute_I(S);
    return {projectivize(I.plus), projectivize(I.minus)};
}

// Real parameters of the symmetric slice: odd (r, Re x_i, Im x_i); even (Re x_i, Im x_i),
// one entry per conjugate pair.
inline std::vector<double> symmetric_params(const branch_configuration& cfg) {
    std::vector<double> p;
    if (cfg.family == family_kind::odd) p.push_back(cfg.r);
    for (int i = 0; i < cfg.n; ++i) {
        p.push_back(cfg.x[2 * i].real());
        p.push_back(std::abs(cfg.x[2 * i].imag()));
    }
    return p;
}

inline branch_configuration config_from_params(const branch_configuration& like,
                                               const std::vector<double>& p) {
    std::vector<cx> x(2 * like.n);
    size_t off = like.family == family_kind::odd ? 1 : 0;
    for (int i = 0; i < like.n; ++i) {
        x[2 * i] = cx(p[off + 2 * i], p[off + 2 * i + 1]);
        x[2 * i + 1] = std::conj(x[2 * i]);
    }
    std::optional<double> r;
    if (like.family == family_kind::odd) r = p[0];
    return build_family(like.family, like.n, r, x);
}

inline std::vector<double> concat_I(const branch_configuration& cfg, const tolerances& tol) {
    curve_system S(cfg, tol);
    return compute_I(S).concat();
}

// Central finite differences of cfg -> F(cfg) over the symmetric parameters.
inline std::vector<std::vector<double>> fd_derivatives(
    const branch_configuration& cfg, const tolerances& tol,
    const std::function<std::vector<double>(const branch_configuration&)>& F) {
    std::vector<double> p0 = symmetric_params(cfg);
    std::vector<std::vector<double>> cols(p0.size());
    parallel_for(p0.size(), [&](size_t k) {
        double h = tol.h_fd * std::max(1.0, std::abs(p0[k]));
        auto pp = p0, pm = p0;
        pp[k] += h;
        pm[k] -= h;
        std::vector<double> Fp, Fm;
        try {
            Fp = F(config_from_params(cfg, pp));
            Fm = F(config_from_params(cfg, pm));
        } catch (const domain_error& e) {
            throw step_error(std::string("finite-difference step left the domain: ") + e.what());
        }
        std::vector<double> col(Fp.size());
        for (size_t i = 0; i < Fp.size(); ++i) col[i] = (Fp[i] - Fm[i]) / (2 * h);
        cols[k] = std::move(col);
    });
    return cols;
}

struct jacobian_report {
    Eigen::MatrixXd J;  // chart coordinates of phi vs symmetric parameters
    std::vector<double> singular_values;
    double condition_number = 0.0;
    bool invertible = false;
    int chart_plus = 0, chart_minus = 0;
};

inline jacobian_report jacobian_phi(const branch_configuration& cfg, tolerances tol = {}) {
    curve_system S(cfg, tol);
    phi_value base = phi(S);
    int cp = base.plus.chart, cm = base.minus.chart;
    auto chart_fn = [&](const branch_configuration& c) {
        curve_system Sc(c, tol);
        period_vector I = compute_I(Sc);
        projective_point P; P.homogeneous = I.plus; P.chart = cp;
        projective_point M; M.homogeneous = I.minus; M.chart = cm;
        std::vector<double> out = P.chart_coords();
        for (double v : M.chart_coords()) out.push_back(v);
        return out;
    };
    auto cols = fd_derivatives(cfg, tol, chart_fn);
    size_t rows = cols.empty() ? 0 : cols[0].size();
    jacobian_report rep;
    rep.chart_plus = cp;
    rep.chart_minus = cm;
    rep.J.resize(rows, cols.size());
    for (size_t k = 0; k < cols.size(); ++k)
        for (size_t i = 0; i < rows; ++i) rep.J(i, k) = cols[k][i];
    if (rows != cols.size()) throw solve_error("phi chart dimension mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rep.J);
    for (int i = 0; i < svd.singularValues().size(); ++i)
        rep.singular_values.push_back(svd.singularValues()(i));
    double smin = rep.singular_values.back(), smax = rep.singular_values.front();
    rep.condition_number = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    rep.invertible = smin > 1e-12 * std::max(1.0, smax);
    return rep;
}

// ---------------------------------------------------------------------------
// the decomposition (Ihat_+; Ihat_-) + delta_+ (I_+;0) + delta_- (0;I_-) in
// span{ d/dr, d/dRe x_i, d/dIm x_i } of (I_+; I_-)
// ---------------------------------------------------------------------------

struct decomposition_coeffs {
    double delta_plus = 0.0, delta_minus = 0.0;
    double chi = 0.0;               // d/dr coefficient (odd family)
    std::vector<double> xi;         // pair-direction coefficients
    double residual = 0.0;
    Eigen::MatrixXd span_matrix;    // columns: (I+;0), (0;I-), derivative directions
};

inline decomposition_coeffs solve_delta(const branch_configuration& cfg, tolerances tol = {}) {
    curve_system S(cfg, tol);
    period_vector I = compute_I(S);
    period_vector Ih = compute_hat_I(S);
    size_t np = I.plus.size(), nm = I.minus.size(), dim = np + nm;

    auto cols = fd_derivatives(cfg, tol, [&](const branch_configuration& c) {
        return concat_I(c, tol);
    });
    size_t ncoef = 2 + cols.size();
    if (ncoef != dim)
        throw singular_system_error("span dimension mismatch in delta solve");
    Eigen::MatrixXd A(dim, ncoef);
    for (size_t i = 0; i < dim; ++i) {
        A(i, 0) = i < np ? I.plus[i] : 0.0;
        A(i, 1) = i < np ? 0.0 : I.minus[i - np];
    }
    for (size_t k = 0; k < cols.size(); ++k)
        for (size_t i = 0; i < dim; ++i) A(i, 2 + k) = -cols[k][i];
    Eigen::VectorXd rhs(dim);
    auto ihc = Ih.concat();
    for (size_t i = 0; i < dim; ++i) rhs(i) = -ihc[i];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (!(cond < 1e10)) throw singular_system_error("delta spanning set nearly dependent");
    Eigen::VectorXd sol = svd.solve(rhs);

    decomposition_coeffs dc;
    dc.delta_plus = sol(0);
    dc.delta_minus = sol(1);
    size_t k0 = 2;
    if (cfg.family == family_kind::odd) {
        dc.chi = sol(2);
        k0 = 3;
    }
    for (size_t k = k0; k < ncoef; ++k) dc.xi.push_back(sol(k));
    dc.residual = (A * sol - rhs).norm();
    dc.span_matrix = A;
    return dc;
}

// ---------------------------------------------------------------------------
// T_p and the iterated condition
// ---------------------------------------------------------------------------

// T_p(u) = d (3u - 4d) / (4u - 5d), d = D_+ - D_-.  Parabolic with fixed point u = d;
// conjugating by S(u) = 1/(u - d) turns it into v -> v - 4/d.
struct moebius_T {
    double d;

    double fixed_point() const { return d; }
    double translation_step() const { return -4.0 / d; }
    double apply(double u) const {
        double den = 4 * u - 5 * d;
        if (den == 0.0) return std::numeric_limits<double>::infinity();
        return d * (3 * u - 4 * d) / den;
    }
    double iterate(double u, long k) const {
        // via the conjugated translation; exact parabolic orbit
        if (u == d) return d;
        double v = 1.0 / (u - d) - 4.0 * double(k) / d;
        return d + 1.0 / v;
    }
};

struct moebius_report {
    moebius_T T;
    double delta_diff;    // delta_- - delta_+ (the quantity T iterates)
    double D_diff;        // D_+ - D_-
    double min_abs_value; // min over k of |4 T^k(delta_diff) - 5 D_diff|
    long argmin_k = 0;
    bool condition_holds = true;
};

inline moebius_report moebius_iterate_values(double D_plus, double D_minus, double delta_plus,
                                             double delta_minus, long k_max) {
    double d = D_plus - D_minus;
    if (d == 0.0) throw degenerate_t_error("D_+ = D_-; T is degenerate");
    moebius_report rep;
    rep.T = moebius_T{d};
    rep.D_diff = d;
    rep.delta_diff = delta_minus - delta_plus;
    rep.min_abs_value = std::numeric_limits<double>::infinity();
    for (long k = 0; k <= k_max; ++k) {
        double v = 4.0 * rep.T.iterate(rep.delta_diff, k) - 5.0 * d;
        if (std::abs(v) < rep.min_abs_value) {
            rep.min_abs_value = std::abs(v);
            rep.argmin_k = k;
        }
        if (v == 0.0) rep.condition_holds = false;
    }
    return rep;
}

inline moebius_report moebius_iterate(const branch_configuration& cfg, long k_max,
                                      tolerances tol = {}) {
    curve_system S(cfg, tol);
    auto zp = extract_zeta_and_D(S.Om_p, cfg);
    auto zm = extract_zeta_and_D(S.Om_m, cfg);
    auto dc = solve_delta(cfg, tol);
    return moebius_iterate_values(zp.D_series.real(), zm.D_series.real(), dc.delta_plus,
                                  dc.delta_minus, k_max);
}

// Exact rational arithmetic for the iterated condition when D_+-, delta_+- are rational.
struct rational {
    long long num = 0, den = 1;

    rational() = default;
    rational(long long n, long long d = 1) : num(n), den(d) { reduce(); }
    void reduce() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    friend rational operator+(rational a, rational b) {
        return rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend rational operator-(rational a, rational b) {
        return rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend rational operator*(rational a, rational b) {
        return rational(a.num * b.num, a.den * b.den);
    }
    friend rational operator/(rational a, rational b) {
        return rational(a.num * b.den, a.den * b.num);
    }
    friend bool operator==(rational a, rational b) {
        return a.num * b.den == b.num * a.den;
    }
};

// Checks 4 T^k(delta_diff) != 5 d for k = 0..k_max in exact arithmetic, via the
// conjugation S(u) = 1/(u - d), under which T becomes v -> v - 4/d.  Returns the chain
// values S(delta_diff) - 4k/d; the condition fails at k iff that value equals S(5d/4).
struct exact_chain_report {
    std::vector<rational> chain;
    rational target;
    bool condition_holds = true;
};

inline exact_chain_report exact_parabolic_chain(rational d, rational delta_diff, long k_max) {
    if (d.num == 0) throw degenerate_t_error("D_+ = D_- in exact chain");
    exact_chain_report rep;
    if (delta_diff == d) throw degenerate_t_error("delta difference sits at the fixed point");
    rational v = rational(1) / (delta_diff - d);
    rational step = rational(4) / d;
    rep.target = rational(1) / (rational(5, 4) * d - d);  // S(5d/4)
    for (long k = 0; k <= k_max; ++k) {
        rep.chain.push_back(v);
        if (v == rep.target) rep.condition_holds = false;
        v = v - step;
    }
    return rep;
}

}  // namespace spectral_torus
