// degenerate.hpp - the boundary family (p, mu, nu): nodal-curve period vectors at nu = 0,
// node-to-node b-representatives, the normalized holomorphic differential at the node,
// nu-stencils, and the matrix H(mu).
#pragma once

#include <Eigen/Dense>
#include <optional>

#include "spectral_torus/period_map.hpp"

namespace spectral_torus {

namespace detail {

// Open path from x = mu around `target` and back, routed over the real axis.
// The integral of a pulled-back differential over this path, seeded at -y_principal(mu),
// is the new b-period of the nodal curve (the cycle through the node).
inline planar_path node_route(const quotient_curve& curve, double mu, cx target) {
    double clr = std::numeric_limits<double>::infinity();
    for (cx b : curve.branch)
        if (std::abs(b - target) > 1e-14) clr = std::min(clr, std::abs(b - target));
    clr = std::min({0.3 * clr, 0.35 * std::abs(cx(mu) - target), 1.0});
    if (!(clr > 0)) throw geometry_error("node route target too crowded");
    double top = std::max(1.0, 2.2 * clr);
    for (cx b : curve.branch) top = std::max(top, std::abs(b.imag()) + std::max(1.0, 1.5 * clr));

    auto clearance_ok = [&](const planar_path& p) {
        for (cx b : curve.branch)
            if (p.distance_to(b) < 0.2 * clr) return false;
        return true;
    };
    for (double shift : {0.0, 0.6, -0.6, 1.3, -1.3, 2.2, -2.2}) {
        double phi = M_PI / 2 + shift * 0.45;  // circle entry angle, scanned with the shift
        cx entry = target + clr * std::polar(1.0, phi);
        planar_path p;
        cx up = cx(mu, 0.0);
        cx high1 = cx(mu + shift * clr, top);
        cx high2 = cx(entry.real(), top);
        p.append(segment::line(up, high1));
        if (std::abs(high1 - high2) > 1e-12) p.append(segment::line(high1, high2));
        p.append(segment::line(high2, entry));
        p.append(segment::arc(target, clr, phi, phi + 2 * M_PI));
        p.append(segment::line(entry, high2));
        if (std::abs(high1 - high2) > 1e-12) p.append(segment::line(high2, high1));
        p.append(segment::line(high1, up));
        bool winds_ok = true;
        for (cx b : curve.branch) {
            int want = std::abs(b - target) < 1e-14 ? 1 : 0;
            double w = p.winding_raw(b);
            if (std::abs(w - want) > 1e-6) winds_ok = false;
        }
        if (winds_ok && clearance_ok(p)) return p;
    }
    throw geometry_error("no clear node route found");
}

}  // namespace detail

// The point (p, mu, 0): quotient curves acquire a node over x = mu; differentials pull
// back to the base curve with the (x - mu) factors cancelling, so every quantity is
// integrated on the base curve.  New b-representatives run node-to-node around {r} (Y+)
// and {-2} (Y-).
struct degenerate_family {
    branch_configuration base;
    double mu;
    tolerances tol;
    curve_system S;
    planar_path route_p, route_m;
    cx yhat_p, yhat_m;  // principal branch values at x = mu

    degenerate_family(const branch_configuration& p, double mu_, tolerances t = {})
        : base(p), mu(mu_), tol(t), S(p, t) {
        if (p.family != family_kind::odd)
            throw domain_error("degenerate machinery implemented for the odd family");
        for (cx b : S.Yp.branch)
            if (std::abs(b - mu) < 1e-6) throw degenerate_configuration_error("mu hits a branch point");
        route_p = detail::node_route(S.Yp, mu, cx(base.r));
        route_m = detail::node_route(S.Ym, mu, cx(-2.0));
        yhat_p = S.Yp.y_principal(mu);
        yhat_m = S.Ym.y_principal(mu);
        check_zeta_clearance();
    }

    void check_zeta_clearance() const {
        for (cx z : S.Om_p.zeta)
            if (std::abs(z - mu) < 1e-6)
                throw degenerate_configuration_error("mu collides with a zeta_+ root");
        for (cx z : S.Om_m.zeta)
            if (std::abs(z - mu) < 1e-6)
                throw degenerate_configuration_error("mu collides with a zeta_- root");
    }

    // node-to-node integral on the chosen curve, seeded at (mu, -y_principal)
    template <class Density>
    cx node_period(curve_sign sg, const Density& f) const {
        const quotient_curve& c = sg == curve_sign::plus ? S.Yp : S.Ym;
        const planar_path& route = sg == curve_sign::plus ? route_p : route_m;
        cx seed = -(sg == curve_sign::plus ? yhat_p : yhat_m);
        sheet_path sp = trace_sheet(c, route, seed_rule::explicit_value, seed);
        return integrate_form(sp, f, tol.tol_quad).value;
    }

    cx new_plus_raw() const {
        return node_period(curve_sign::plus, [&](cx x, cx y) { return S.Om_p.density(x, y); });
    }
    cx new_minus_raw() const {
        return node_period(curve_sign::minus, [&](cx x, cx y) { return S.Om_m.density(x, y); });
    }

    // I_+-(p^o) as raw complex entries: base entries followed by the node period.
    std::vector<cx> I_raw() const {
        period_vector I = compute_I(S);
        std::vector<cx> plus, minus;
        for (size_t k = 0; k < I.provenance.size(); ++k)
            (k < I.plus.size() ? plus : minus).push_back(I.provenance[k].raw);
        plus.push_back(new_plus_raw());
        minus.push_back(new_minus_raw());
        plus.insert(plus.end(), minus.begin(), minus.end());
        return plus;
    }

    // Real extraction matching the period-vector conventions: plus block by Im,
    // minus block by Re.
    std::vector<double> I_real() const {
        auto raw = I_raw();
        size_t np = S.cyc_p.c_paths.size() + S.cyc_p.b_cycles.size() + 1;
        std::vector<double> v(raw.size());
        for (size_t k = 0; k < raw.size(); ++k)
            v[k] = k < np ? raw[k].imag() : raw[k].real();
        return v;
    }

    size_t plus_size() const { return S.cyc_p.c_paths.size() + S.cyc_p.b_cycles.size() + 1; }

    // c-solve at the node: base rows plus the vanishing-cycle residue row; returns the
    // c_j(p^o) (last entry is the coefficient at zeta_{n+1} = mu, zero in exact arithmetic).
    std::vector<cx> c_coeffs_at_node(curve_sign sg) const {
        const quotient_curve& c = sg == curve_sign::plus ? S.Yp : S.Ym;
        const cycle_set& cyc = sg == curve_sign::plus ? S.cyc_p : S.cyc_m;
        const second_kind_differential& Om = sg == curve_sign::plus ? S.Om_p : S.Om_m;
        cx yh = sg == curve_sign::plus ? yhat_p : yhat_m;
        int m = static_cast<int>(cyc.a_cycles.size());
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m + 1, m + 1);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m + 1);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                cx zj = Om.zeta[j];
                M(i, j) = cyc.a_cycles[i]
                              .integrate([&](cx x, cx y) { return Om.numerator.eval(x) / ((x - zj) * y); },
                                         tol.tol_quad)
                              .value;
            }
            M(i, m) = cyc.a_cycles[i]
                          .integrate([&](cx x, cx y) { return Om.numerator.eval(x) / ((x - mu) * y); },
                                     tol.tol_quad)
                          .value;
            rhs(i) = -1.5 * cyc.a_cycles[i]
                               .integrate([&](cx x, cx y) { return x * Om.numerator.eval(x) / y; },
                                          tol.tol_quad)
                               .value;
        }
        // vanishing cycle: every integrand above is regular at the node except the
        // 1/(x - mu) column, which picks up the residue
        M(m, m) = cx(0.0, 2.0 * M_PI) * Om.numerator.eval(mu) / yh;
        rhs(m) = 0.0;
        Eigen::VectorXcd sol = M.colPivHouseholderQr().solve(rhs);
        std::vector<cx> out(m + 1);
        for (int j = 0; j <= m; ++j) out[j] = sol(j);
        return out;
    }

    // hat differentials at the node: pullbacks equal the base hat differentials.
    std::vector<cx> Ihat_raw() const {
        auto cp = c_coeffs_at_node(curve_sign::plus);
        auto cm = c_coeffs_at_node(curve_sign::minus);
        auto make_density = [&](const second_kind_differential& Om, const std::vector<cx>& cc) {
            return [&Om, cc, this](cx x, cx y) {
                cx v = 1.5 * x * Om.numerator.eval(x);
                for (size_t j = 0; j + 1 < cc.size(); ++j)
                    v += cc[j] * Om.numerator.eval(x) / (x - Om.zeta[j]);
                v += cc.back() * Om.numerator.eval(x) / (x - mu);
                return v / y;
            };
        };
        auto fp = make_density(S.Om_p, cp);
        auto fm = make_density(S.Om_m, cm);
        std::vector<cx> plus, minus;
        for (size_t k = 0; k < S.cyc_p.c_paths.size(); ++k)
            plus.push_back(integrate_form(S.cyc_p.c_paths[k], fp, tol.tol_quad).value);
        for (const auto& b : S.cyc_p.b_cycles) plus.push_back(b.integrate(fp, tol.tol_quad).value);
        plus.push_back(node_period(curve_sign::plus, fp));
        for (const auto& b : S.cyc_m.b_cycles) minus.push_back(b.integrate(fm, tol.tol_quad).value);
        minus.push_back(node_period(curve_sign::minus, fm));
        plus.insert(plus.end(), minus.begin(), minus.end());
        return plus;
    }

    // omega(p^o): numerator q of degree n with int_{a_i} q dx/((x-mu) y_+) = 0 and unit
    // residue at the node preimage (mu, +yhat), so kappa = q_n.
    normalized_holomorphic omega_at_node() const {
        int m = static_cast<int>(S.cyc_p.a_cycles.size());
        Eigen::MatrixXcd M(m + 1, m + 1);
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m + 1);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k <= m; ++k)
                M(i, k) = S.cyc_p.a_cycles[i]
                              .integrate([&](cx x, cx y) { return std::pow(x, k) / ((x - mu) * y); },
                                         tol.tol_quad)
                              .value;
        for (int k = 0; k <= m; ++k) M(m, k) = std::pow(cx(mu), k) / yhat_p;
        rhs(m) = 1.0;
        normalized_holomorphic w;
        detail::check_condition(M, 1e12, &w.condition_number);
        Eigen::VectorXcd sol = M.colPivHouseholderQr().solve(rhs);
        std::vector<cx> coeffs(m + 1);
        for (int k = 0; k <= m; ++k) coeffs[k] = sol(k);
        w.numerator = poly(coeffs);
        w.kappa = coeffs[m];
        w.beta = poly_roots(w.numerator);
        return w;
    }

    // reciprocity: node-to-node period of Omega_+(p^o) equals 4 kappa(p^o)
    double reciprocity_residual() const {
        normalized_holomorphic w = omega_at_node();
        cx lhs = new_plus_raw();
        return std::abs(lhs - 4.0 * w.kappa);
    }
};

// ---------------------------------------------------------------------------
// the nearby smooth family (p, mu, nu) and nu-stencils
// ---------------------------------------------------------------------------

struct nu_family {
    branch_configuration base;
    double mu;
    tolerances tol;

    branch_configuration config(double nu) const {
        std::vector<cx> x = base.x;
        x.push_back(cx(mu, nu));
        x.push_back(cx(mu, -nu));
        return build_family(base.family, base.n + 1, base.r, x);
    }

    // raw I entries at (p, mu, nu), sign-matched entrywise to the nu = 0 reference
    std::vector<cx> I_raw(double nu, const std::vector<cx>& ref) const {
        curve_system S(config(nu), tol);
        period_vector I = compute_I(S);
        std::vector<cx> plus, minus;
        for (size_t k = 0; k < I.provenance.size(); ++k)
            (k < I.plus.size() ? plus : minus).push_back(I.provenance[k].raw);
        std::vector<cx> v = plus;
        v.insert(v.end(), minus.begin(), minus.end());
        if (v.size() != ref.size()) throw stencil_error("family period vector size mismatch");
        for (size_t k = 0; k < v.size(); ++k)
            if (std::abs(v[k] - ref[k]) > std::abs(v[k] + ref[k])) v[k] = -v[k];
        return v;
    }

    // kappa(nu) from the normalized holomorphic solve, sign-matched to ref
    cx kappa(double nu, cx ref) const {
        curve_system S(config(nu), tol);
        normalized_holomorphic w = solve_normalized_holomorphic(S.Yp, S.cyc_p, tol.tol_quad);
        if (std::abs(w.kappa - ref) > std::abs(w.kappa + ref)) return -w.kappa;
        return w.kappa;
    }

    // numerator root of Omega_+(nu) closest to mu
    cx zeta_new(double nu) const {
        curve_system S(config(nu), tol);
        cx best = S.Om_p.zeta.front();
        for (cx z : S.Om_p.zeta)
            if (std::abs(z - mu) < std::abs(best - mu)) best = z;
        return best;
    }
};

struct nu_stencil {
    std::vector<cx> f0, fh, f2h;
    double h;

    std::vector<cx> second_derivative() const {
        // symmetric in nu, so f(-h) = f(h): f'' = (-f(2h) + 16 f(h) - 15 f(0)) / (6 h^2)
        std::vector<cx> d(f0.size());
        for (size_t k = 0; k < f0.size(); ++k)
            d[k] = (-f2h[k] + 16.0 * fh[k] - 15.0 * f0[k]) / (6.0 * h * h);
        return d;
    }
};

inline nu_stencil make_I_stencil(const degenerate_family& D, double h) {
    if (!(h > 0)) throw stencil_error("nu step must be positive");
    nu_family F{D.base, D.mu, D.tol};
    nu_stencil st;
    st.h = h;
    st.f0 = D.I_raw();
    st.fh = F.I_raw(h, st.f0);
    st.f2h = F.I_raw(2 * h, st.f0);
    return st;
}

// symmetric-difference check of d/dnu I = 0 (construction symmetry makes it a test of
// deterministic cycle assembly, not a tautology: the +-nu builds differ)
inline double dI_dnu_residual(const degenerate_family& D, double h) {
    nu_family F{D.base, D.mu, D.tol};
    auto ref = D.I_raw();
    auto fp = F.I_raw(h, ref);
    auto fm = F.I_raw(-h, ref);
    double worst = 0.0;
    for (size_t k = 0; k < fp.size(); ++k)
        worst = std::max(worst, std::abs(fp[k] - fm[k]) / (2 * h));
    return worst;
}

// ---------------------------------------------------------------------------
// H(mu) and its determinant
// ---------------------------------------------------------------------------

struct H_report {
    Eigen::MatrixXd H;
    double h_det = 0.0;
    std::vector<double> dnu_row_scale;  // |d/dnu I| residuals, should vanish
};

// Rows: (I+(p^o), 0), (0, I-(p^o)), d/dr, d/dRe x_i, d/dIm x_i, d/dmu, d2/dnu2 of
// (I+, I-)(p^o).  Derivative rows use the symmetric-slice frame; this spans the same
// row space as the per-branch-point derivatives.
inline H_report build_H_det(const branch_configuration& p, double mu, tolerances tol = {},
                            double nu_step = 0.0) {
    degenerate_family D(p, mu, tol);
    size_t np = D.plus_size();
    auto base_real = D.I_real();
    size_t dim = base_real.size();  // 2n+5

    H_report rep;
    rep.H = Eigen::MatrixXd::Zero(dim, dim);
    for (size_t j = 0; j < np; ++j) rep.H(0, j) = base_real[j];
    for (size_t j = np; j < dim; ++j) rep.H(1, j) = base_real[j];

    auto real_of = [np](const std::vector<cx>& raw) {
        std::vector<double> v(raw.size());
        for (size_t k = 0; k < raw.size(); ++k)
            v[k] = k < np ? raw[k].imag() : raw[k].real();
        return v;
    };

    // parameter derivatives (r, Re x_i, Im x_i) of the degenerate-family values
    std::vector<double> p0 = symmetric_params(p);
    std::vector<std::vector<double>> rows(p0.size());
    parallel_for(p0.size(), [&](size_t k) {
        double h = tol.h_fd * std::max(1.0, std::abs(p0[k]));
        auto pp = p0, pm = p0;
        pp[k] += h;
        pm[k] -= h;
        degenerate_family Dp(config_from_params(p, pp), mu, tol);
        degenerate_family Dm(config_from_params(p, pm), mu, tol);
        auto vp = real_of(Dp.I_raw());
        auto vm = real_of(Dm.I_raw());
        std::vector<double> row(vp.size());
        for (size_t i = 0; i < vp.size(); ++i) row[i] = (vp[i] - vm[i]) / (2 * h);
        rows[k] = std::move(row);
    });
    for (size_t k = 0; k < rows.size(); ++k)
        for (size_t i = 0; i < dim; ++i) rep.H(2 + k, i) = rows[k][i];

    // d/dmu row: base entries are mu-independent by construction
    {
        double h = tol.h_fd * std::max(1.0, std::abs(mu));
        degenerate_family Dp(p, mu + h, tol);
        degenerate_family Dm(p, mu - h, tol);
        auto vp = real_of(Dp.I_raw());
        auto vm = real_of(Dm.I_raw());
        for (size_t i = 0; i < dim; ++i) rep.H(2 + rows.size(), i) = (vp[i] - vm[i]) / (2 * h);
    }

    // d2/dnu2 row
    {
        double h = nu_step > 0 ? nu_step : 1e-2 * std::sqrt(std::max(1.0, std::abs(mu)));
        nu_stencil st = make_I_stencil(D, h);
        auto dd = st.second_derivative();
        auto v = real_of(dd);
        for (size_t i = 0; i < dim; ++i) rep.H(3 + rows.size(), i) = v[i];
        rep.dnu_row_scale.push_back(dI_dnu_residual(D, h));
    }

    rep.h_det = rep.H.determinant();
    return rep;
}

// delta decomposition at p^o: (Ihat+; Ihat-)(p^o) + delta_+ (I+(p^o);0) + delta_- (0;I-(p^o))
// in span{d/dr, d/dRe x_i, d/dIm x_i, d/dmu, d2/dnu2}.
struct degenerate_delta {
    double delta_plus = 0.0, delta_minus = 0.0;
    double residual = 0.0;
};

// Works on the raw complex entries (the real extraction degenerates for mu outside
// (-2,2), where the new plus entry is real rather than imaginary).
inline degenerate_delta solve_delta_at_node(const branch_configuration& p, double mu,
                                            tolerances tol = {}, double nu_step = 0.0) {
    degenerate_family D(p, mu, tol);
    auto base = D.I_raw();
    size_t np = D.plus_size();
    size_t dim = base.size();

    std::vector<std::vector<cx>> spans;
    {  // parameter derivatives
        std::vector<double> p0 = symmetric_params(p);
        for (size_t k = 0; k < p0.size(); ++k) {
            double h = tol.h_fd * std::max(1.0, std::abs(p0[k]));
            auto pp = p0, pm = p0;
            pp[k] += h;
            pm[k] -= h;
            degenerate_family Dp(config_from_params(p, pp), mu, tol);
            degenerate_family Dm(config_from_params(p, pm), mu, tol);
            auto vp = Dp.I_raw(), vm = Dm.I_raw();
            std::vector<cx> row(dim);
            for (size_t i = 0; i < dim; ++i) row[i] = (vp[i] - vm[i]) / (2 * h);
            spans.push_back(std::move(row));
        }
    }
    {  // d/dmu
        double h = tol.h_fd * std::max(1.0, std::abs(mu));
        degenerate_family Dp(p, mu + h, tol), Dm(p, mu - h, tol);
        auto vp = Dp.I_raw(), vm = Dm.I_raw();
        std::vector<cx> row(dim);
        for (size_t i = 0; i < dim; ++i) row[i] = (vp[i] - vm[i]) / (2 * h);
        spans.push_back(std::move(row));
    }
    {  // d2/dnu2
        double h = nu_step > 0 ? nu_step : 1e-2 * std::sqrt(std::max(1.0, std::abs(mu)));
        nu_stencil st = make_I_stencil(D, h);
        spans.push_back(st.second_derivative());
    }

    auto ihat = D.Ihat_raw();
    Eigen::MatrixXcd A(dim, dim);
    Eigen::VectorXcd rhs(dim);
    for (size_t i = 0; i < dim; ++i) {
        A(i, 0) = i < np ? base[i] : cx(0.0);
        A(i, 1) = i < np ? cx(0.0) : base[i];
        for (size_t k = 0; k < spans.size(); ++k) A(i, 2 + k) = -spans[k][i];
        rhs(i) = -ihat[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (!(cond < 1e10)) throw singular_system_error("degenerate delta span nearly dependent");
    Eigen::VectorXcd sol = svd.solve(rhs);
    degenerate_delta out;
    out.delta_plus = sol(0).real();
    out.delta_minus = sol(1).real();
    out.residual = (A * sol - rhs).norm();
    return out;
}

}  // namespace spectral_torus
