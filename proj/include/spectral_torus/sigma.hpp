// sigma.hpp - cycles on the double cover Sigma, pushforward certificates and the
// spectral-candidate integrality check (two-level tracking: lambda over x, eta over lambda).
#pragma once

#include <random>

#include "spectral_torus/degenerate.hpp"
#include "spectral_torus/period_map.hpp"

namespace spectral_torus {

namespace detail {

inline std::pair<cx, cx> lambda_roots(cx x) {
    cx d = std::sqrt(x * x - 4.0);
    return {0.5 * (x + d), 0.5 * (x - d)};
}

struct cover_state {
    cx x, lam, eta;
};

template <class PsqFn>
void cover_advance(const PsqFn& psq, cover_state& st, cx x1, int depth = 48) {
    auto [l1, l2] = lambda_roots(x1);
    cx cand = std::abs(l1 - st.lam) <= std::abs(l2 - st.lam) ? l1 : l2;
    if (std::abs(cand - st.lam) > 0.45 * std::abs(st.lam)) {
        if (depth == 0) throw continuation_error("lambda lift hit the resolution floor");
        cx xm = 0.5 * (st.x + x1);
        cover_advance(psq, st, xm, depth - 1);
        cover_advance(psq, st, x1, depth - 1);
        return;
    }
    st.eta = continue_branch(psq, st.lam, st.eta, cand);
    st.lam = cand;
    st.x = x1;
}

}  // namespace detail

// A cycle on Sigma: either a native lambda-plane path with tracked eta, or the lift of an
// x-plane path through the cover (lambda and eta both tracked), possibly traversed twice.
struct sigma_cycle {
    std::string name;
    bool native = true;
    planar_path path;  // lambda plane if native, x plane if lifted
    cx eta_seed;
    cx lam_seed;       // lifted only
    int traversals = 1;
};

struct sigma_cycle_set {
    sigma_curve Sig;
    std::vector<sigma_cycle> A, B;
    std::vector<sigma_cycle> C;  // open curves C_1, C_{-1}
};

namespace detail {

// integrate f(x, lambda, eta) dx over a lifted x-path
template <class PsqFn, class CondFn, class Integrand>
cx integrate_lifted_segment(const PsqFn& psq, const CondFn& cond, const segment& seg, double s0,
                            double s1, cover_state& st, const Integrand& f, double tol,
                            int depth, double& err) {
    auto pass = [&](double a, double b, cover_state state, cover_state* out, double& noise) {
        const auto& g = gauss32();
        cx tot = 0.0;
        double mass = 0.0;
        double segscale = std::max({std::abs(seg.point(0.0)), std::abs(seg.point(1.0)),
                                    seg.length()});
        for (size_t i = 0; i < g.x.size(); ++i) {
            double s = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
            cover_advance(psq, state, seg.point(s));
            cx term = f(state.x, state.lam, state.eta) * seg.deriv(s);
            tot += g.w[i] * term;
            mass += g.w[i] * std::abs(term) * (1.0 + 0.5 * cond(state.lam, segscale));
        }
        cover_advance(psq, state, seg.point(b));
        *out = state;
        noise += 0.5 * std::abs(b - a) * mass * 1.2e-16;
        return 0.5 * (b - a) * tot;
    };
    double ncoarse = 0.0, nfine = 0.0;
    cover_state tmp;
    cx coarse = pass(s0, s1, st, &tmp, ncoarse);
    double sm = 0.5 * (s0 + s1);
    cover_state mid;
    cx a = pass(s0, sm, st, &mid, nfine);
    cover_state fin;
    cx b = pass(sm, s1, mid, &fin, nfine);
    double diff = std::abs(coarse - (a + b));
    double floor = 4.0 * (ncoarse + nfine) + 2e-15 * (std::abs(a) + std::abs(b));
    if (diff <= std::max(tol, floor) || depth >= 24) {
        if (depth >= 24 && diff > std::max(tol, floor) * 32)
            throw max_refinement_error("lifted quadrature cap");
        st = fin;
        err += std::max(diff, floor);
        return a + b;
    }
    cx left = integrate_lifted_segment(psq, cond, seg, s0, sm, st, f, 0.5 * tol, depth + 1, err);
    cx right = integrate_lifted_segment(psq, cond, seg, sm, s1, st, f, 0.5 * tol, depth + 1, err);
    return left + right;
}

}  // namespace detail

struct sigma_context {
    branch_configuration cfg;
    sigma_curve Sig;
    quotient_curve Yp, Ym;

    explicit sigma_context(const branch_configuration& c)
        : cfg(c), Sig(assemble_sigma(c)), Yp(make_quotient(c, curve_sign::plus)),
          Ym(make_quotient(c, curve_sign::minus)) {}

    cx psq(cx l) const { return Sig.psq(l); }

    // q_+^* and q_-^* pullback densities with respect to d(lambda) and dx
    cx pull_plus_dl(const poly& N, cx lam, cx eta) const {
        cx x = lam + 1.0 / lam;
        int n = cfg.n;
        if (cfg.family == family_kind::odd)
            return N.eval(x) * std::pow(lam, n - 1) * (lam * lam - 1.0) / eta;
        return N.eval(x) * std::pow(lam, n - 1) * (lam - 1.0) / eta;
    }
    cx pull_minus_dl(const poly& N, cx lam, cx eta) const {
        cx x = lam + 1.0 / lam;
        int n = cfg.n;
        if (cfg.family == family_kind::odd) return N.eval(x) * std::pow(lam, n) / eta;
        return N.eval(x) * std::pow(lam, n - 1) * (lam + 1.0) / eta;
    }
    cx pull_plus_dx(const poly& N, cx x, cx lam, cx eta) const {
        int n = cfg.n;
        if (cfg.family == family_kind::odd) return N.eval(x) * std::pow(lam, n + 1) / eta;
        return N.eval(x) * std::pow(lam, n + 1) / ((lam + 1.0) * eta);
    }
    cx pull_minus_dx(const poly& N, cx x, cx lam, cx eta) const {
        int n = cfg.n;
        if (cfg.family == family_kind::odd)
            return N.eval(x) * std::pow(lam, n + 2) / ((lam * lam - 1.0) * eta);
        return N.eval(x) * std::pow(lam, n + 1) / ((lam - 1.0) * eta);
    }

    // eta seed matching a quotient-curve sheet value at the start of a lifted path
    cx eta_from_y(curve_sign sg, cx x, cx lam, cx y) const {
        int n = cfg.n;
        if (cfg.family == family_kind::odd) {
            if (sg == curve_sign::plus) return y * std::pow(lam, n + 1);
            return y * std::pow(lam, n + 2) / (lam * lam - 1.0);
        }
        if (sg == curve_sign::plus) return y * std::pow(lam, n + 1) / (lam + 1.0);
        return y * std::pow(lam, n + 1) / (lam - 1.0);
    }

    double psq_condition(cx l, double scale) const {
        double s = std::max(scale, std::abs(l));
        double c = 1.0;
        for (cx z : Sig.roots)
            c += (s + std::abs(z)) / std::max(std::abs(l - z), 1e-300);
        return c;
    }

    cx integrate(const sigma_cycle& cyc, curve_sign diff_sign, const poly& N,
                 double tol = default_tol_quad) const {
        auto ps = [this](cx l) { return psq(l); };
        auto cond = [this](cx l, double s) { return psq_condition(l, s); };
        if (cyc.native) {
            auto f = [&](cx lam, cx eta) {
                return diff_sign == curve_sign::plus ? pull_plus_dl(N, lam, eta)
                                                     : pull_minus_dl(N, lam, eta);
            };
            return integrate_tracked(ps, cond, cyc.path, cyc.eta_seed, f, tol).value;
        }
        auto f = [&](cx x, cx lam, cx eta) {
            return diff_sign == curve_sign::plus ? pull_plus_dx(N, x, lam, eta)
                                                 : pull_minus_dx(N, x, lam, eta);
        };
        detail::cover_state st{cyc.path.start(), cyc.lam_seed, cyc.eta_seed};
        cx tot = 0.0;
        double err = 0.0;
        for (int rep = 0; rep < cyc.traversals; ++rep)
            for (const auto& seg : cyc.path.segs)
                tot += detail::integrate_lifted_segment(ps, cond, seg, 0.0, 1.0, st, f,
                                                        tol / cyc.path.segs.size(), 0, err);
        return tot;
    }
};

// ---------------------------------------------------------------------------
// construction of the Sigma cycles
// ---------------------------------------------------------------------------

inline sigma_cycle_set build_sigma_cycles(const branch_configuration& cfg,
                                          const curve_system& S) {
    sigma_context ctx(cfg);
    sigma_cycle_set out;
    out.Sig = ctx.Sig;
    bool odd = cfg.family == family_kind::odd;
    auto psq = [&](cx l) { return ctx.psq(l); };

    // A_0 (odd): lift of the a_0 loop, traversed twice
    if (odd) {
        const sheet_path& a0 = S.cyc_m.a_cycles[0].parts[0].first;
        sigma_cycle A0;
        A0.name = "A_0";
        A0.native = false;
        A0.path = a0.path;
        A0.traversals = 2;
        A0.lam_seed = lambda_of_x(a0.path.start());
        A0.eta_seed = ctx.eta_from_y(curve_sign::minus, a0.path.start(), A0.lam_seed, a0.y_start);
        out.A.push_back(std::move(A0));
    }

    // A_i: native loops around the outer preimage pairs; A_{n+i}: the inner pairs
    std::vector<cx> all_lam;
    for (cx z : ctx.Sig.roots) all_lam.push_back(z);
    for (int i = 0; i < cfg.n; ++i) {
        cx l1 = lambda_of_x(cfg.x[2 * i]), l2 = lambda_of_x(cfg.x[2 * i + 1]);
        for (int inner = 0; inner < 2; ++inner) {
            cx p1 = inner ? 1.0 / l1 : l1, p2 = inner ? 1.0 / l2 : l2;
            double clr = std::numeric_limits<double>::infinity();
            for (cx z : all_lam)
                if (std::abs(z - p1) > 1e-12 && std::abs(z - p2) > 1e-12)
                    clr = std::min(clr, segment::line(p1, p2).distance_to(z));
            clr = std::min(0.4 * clr, 0.6 * std::abs(p2 - p1));
            sigma_cycle Ai;
            Ai.name = inner ? "A_" + std::to_string(cfg.n + i + 1) : "A_" + std::to_string(i + 1);
            Ai.native = true;
            cx lo = p1.imag() <= p2.imag() ? p1 : p2;
            cx hi = p1.imag() <= p2.imag() ? p2 : p1;
            Ai.path = pair_loop(lo, hi, clr);
            Ai.eta_seed = [&] {
                cx v = 1.0;
                for (cx z : ctx.Sig.roots) v *= std::sqrt(Ai.path.start() - z);
                return v;
            }();
            out.A.push_back(std::move(Ai));
        }
    }

    // B: lifts of the quotient b-cycles (main loop part only; appended a-corrections have
    // zero winding contributions to the integrality table via vanishing a-periods)
    auto lift_b = [&](const cycle_set& cyc, curve_sign sg, const std::string& prefix) {
        for (size_t k = 0; k < cyc.b_cycles.size(); ++k) {
            const sheet_path& sp = cyc.b_cycles[k].parts[0].first;
            sigma_cycle B;
            B.name = prefix + cyc.b_names[k].substr(1);
            B.native = false;
            B.path = sp.path;
            B.lam_seed = lambda_of_x(sp.path.start());
            B.eta_seed = ctx.eta_from_y(sg, sp.path.start(), B.lam_seed, sp.y_start);
            out.B.push_back(std::move(B));
        }
    };
    lift_b(S.cyc_p, curve_sign::plus, "B+");
    lift_b(S.cyc_m, curve_sign::minus, "B-");

    // C_1 and C_{-1}
    if (odd) {
        cx R = lambda_of_x(cfg.r);
        std::vector<cx> outer = {R};
        for (int i = 0; i < 2 * cfg.n; ++i) outer.push_back(lambda_of_x(cfg.x[i]));
        sigma_cycle C1;
        C1.name = "C_1";
        C1.native = true;
        C1.path = hub_lasso_path(cx(1.0), {R}, all_lam);
        C1.eta_seed = ctx.eta_from_y(curve_sign::plus, cx(2.0), cx(1.0),
                                     seed_value(ctx.Yp, cx(2.0), seed_rule::y_over_i_negative));
        out.C.push_back(std::move(C1));
        sigma_cycle Cm1;
        Cm1.name = "C_-1";
        Cm1.native = true;
        Cm1.path = hub_lasso_path(cx(-1.0), outer, all_lam);
        Cm1.eta_seed = ctx.eta_from_y(curve_sign::plus, cx(-2.0), cx(-1.0),
                                      seed_value(ctx.Yp, cx(-2.0), seed_rule::y_over_i_negative));
        out.C.push_back(std::move(Cm1));
    } else {
        // even family: C_1 from lambda=1 looping {-1, 0}; C_{-1} from lambda=-1 looping {1, 0}
        auto make_C = [&](cx from, std::vector<cx> tg, const std::string& nm, curve_sign sg,
                          cx x_end, seed_rule rule) {
            sigma_cycle C;
            C.name = nm;
            C.native = true;
            C.path = hub_lasso_path(from, tg, all_lam);
            const quotient_curve& q = sg == curve_sign::plus ? ctx.Yp : ctx.Ym;
            C.eta_seed = ctx.eta_from_y(sg, x_end, from, seed_value(q, x_end, rule));
            return C;
        };
        out.C.push_back(make_C(cx(1.0), {cx(-1.0), cx(0.0)}, "C_1", curve_sign::plus, cx(2.0),
                               seed_rule::y_positive));
        out.C.push_back(make_C(cx(-1.0), {cx(1.0), cx(0.0)}, "C_-1", curve_sign::minus,
                               cx(-2.0), seed_rule::y_over_i_negative));
    }
    return out;
}

// compare pushforward periods against quotient periods on random test differentials
struct pushforward_certificate {
    std::string cycle;
    std::string target;
    double multiplier = 0.0;  // fitted ratio sigma-period / quotient-period
    double deviation = 0.0;   // worst relative deviation from the fitted integer ratio
};

inline std::vector<pushforward_certificate> certify_pushforwards(const branch_configuration& cfg,
                                                                 const curve_system& S,
                                                                 const sigma_cycle_set& sc,
                                                                 double tol = 1e-9) {
    sigma_context ctx(cfg);
    std::mt19937 rng(20240915);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<poly> tests;
    for (int t = 0; t < 3; ++t) {
        std::vector<cx> c(std::max(1, cfg.n));
        for (auto& v : c) v = cx(U(rng), U(rng));
        tests.push_back(poly(c));
    }
    std::vector<pushforward_certificate> certs;

    auto compare = [&](const sigma_cycle& cyc, curve_sign sg, const cycle& target,
                       const std::string& tname) {
        pushforward_certificate cert;
        cert.cycle = cyc.name;
        cert.target = tname;
        const quotient_curve& q = sg == curve_sign::plus ? ctx.Yp : ctx.Ym;
        (void)q;
        double worst = 0.0;
        double mult = 0.0;
        for (size_t t = 0; t < tests.size(); ++t) {
            cx up = ctx.integrate(cyc, sg, tests[t]);
            cx down = target.integrate(
                              [&](cx x, cx y) { return tests[t].eval(x) / y; })
                          .value;
            if (std::abs(down) < 1e-12) continue;
            cx ratio = up / down;
            if (t == 0) mult = std::round(ratio.real());
            worst = std::max(worst, std::abs(ratio - mult) );
        }
        cert.multiplier = mult;
        cert.deviation = worst;
        (void)tol;
        return cert;
    };

    bool odd = cfg.family == family_kind::odd;
    if (odd) certs.push_back(compare(sc.A[0], curve_sign::minus, S.cyc_m.a_cycles[0], "a_0^-"));
    for (int i = 0; i < cfg.n; ++i) {
        size_t off = odd ? 1 : 0;
        certs.push_back(compare(sc.A[off + 2 * i], curve_sign::plus, S.cyc_p.a_cycles[i],
                                "a_" + std::to_string(i + 1) + "^+"));
        certs.push_back(compare(sc.A[off + 2 * i + 1], curve_sign::plus, S.cyc_p.a_cycles[i],
                                "a_" + std::to_string(i + 1) + "^+"));
        size_t am = odd ? i + 1 : i;
        certs.push_back(compare(sc.A[off + 2 * i], curve_sign::minus, S.cyc_m.a_cycles[am],
                                "a_" + std::to_string(i + 1) + "^-"));
    }
    // C_1 against c_1 etc.
    if (odd) {
        certs.push_back(compare(sc.C[0], curve_sign::plus,
                                cycle(S.cyc_p.c_paths[0]), "c_1"));
        certs.push_back(compare(sc.C[1], curve_sign::plus,
                                cycle(S.cyc_p.c_paths[1]), "c_-1"));
    }
    return certs;
}

// ---------------------------------------------------------------------------
// the integrality certificate
// ---------------------------------------------------------------------------

struct integer_period_entry {
    std::string cycle, differential;
    cx value;
    long nearest = 0;
    double distance = 0.0;
};

struct spectral_candidate {
    branch_configuration cfg;
    double s_plus = 0.0, s_minus = 0.0;
    cx tau;
    std::vector<integer_period_entry> table;
    double max_distance = 0.0;
    bool passed = false;
};

inline spectral_candidate check_spectral_candidate(const branch_configuration& cfg, double s_plus,
                                                   double s_minus, tolerances tol = {}) {
    if (!(s_plus > 0) || !(s_minus > 0)) throw domain_error("scalings s_+- must be positive");
    curve_system S(cfg, tol);
    sigma_cycle_set sc = build_sigma_cycles(cfg, S);
    sigma_context ctx(cfg);

    spectral_candidate cand;
    cand.cfg = cfg;
    cand.s_plus = s_plus;
    cand.s_minus = s_minus;
    cand.tau = cx(0.0, s_plus / s_minus);

    auto add = [&](const std::string& cyc, const std::string& diff, cx v) {
        integer_period_entry e;
        e.cycle = cyc;
        e.differential = diff;
        e.value = v;
        e.nearest = std::lround(v.real());
        e.distance = std::abs(v - cx(double(e.nearest)));
        cand.table.push_back(e);
        cand.max_distance = std::max(cand.max_distance, e.distance);
    };

    std::vector<const sigma_cycle*> cycles;
    for (const auto& c : sc.A) cycles.push_back(&c);
    for (const auto& c : sc.B) cycles.push_back(&c);
    for (const auto& c : sc.C) cycles.push_back(&c);
    std::vector<std::pair<std::string, cx>> theta(cycles.size()), psi(cycles.size());
    parallel_for(cycles.size(), [&](size_t k) {
        const sigma_cycle& c = *cycles[k];
        cx th = cx(0.0, 1.0) * s_plus * ctx.integrate(c, curve_sign::plus, S.Om_p.numerator, tol.tol_quad);
        cx ps = s_minus * ctx.integrate(c, curve_sign::minus, S.Om_m.numerator, tol.tol_quad);
        theta[k] = {c.name, th};
        psi[k] = {c.name, ps};
    });
    for (size_t k = 0; k < cycles.size(); ++k) {
        add(theta[k].first, "Theta", theta[k].second);
        add(psi[k].first, "Psi", psi[k].second);
    }
    cand.passed = cand.max_distance < tol.tol_int;
    return cand;
}

}  // namespace spectral_torus
