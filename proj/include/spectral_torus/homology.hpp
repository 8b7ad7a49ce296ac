// homology.hpp - concrete a-, b- and c-cycles on the quotient curves, with winding and
// intersection certificates.  Figures 1-2 of the source material are replaced by the
// stated winding/endpoint conditions plus machine-checked certificates.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "spectral_torus/curve.hpp"
#include "spectral_torus/errors.hpp"
#include "spectral_torus/path.hpp"
#include "spectral_torus/quadrature.hpp"
#include "spectral_torus/sheet.hpp"

namespace spectral_torus {

// Integral homology chain: weighted sum of tracked closed loops.
struct cycle {
    std::vector<std::pair<sheet_path, int>> parts;

    cycle() = default;
    explicit cycle(sheet_path sp) { parts.emplace_back(std::move(sp), 1); }

    template <class Integrand>
    quadrature_result integrate(const Integrand& f, double tol = default_tol_quad) const {
        quadrature_result total;
        for (const auto& [sp, w] : parts) {
            auto r = integrate_form(sp, f, tol);
            total.value += double(w) * r.value;
            total.error_estimate += std::abs(w) * r.error_estimate;
            total.nodes_used += r.nodes_used;
        }
        return total;
    }

    int winding(cx z) const {
        int tot = 0;
        for (const auto& [sp, w] : parts) tot += w * sp.path.winding(z);
        return tot;
    }
};

// ---------------------------------------------------------------------------
// segment-segment intersections (exact case analysis)
// ---------------------------------------------------------------------------
namespace detail {

struct crossing {
    double sa, sb;  // local params on the two segments
    cx point;
    double orient;  // sign of cross(dA, dB)
};

inline double cross2(cx a, cx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool arc_contains(const segment& s, double ang, double* sloc) {
    double sweep = s.th1 - s.th0;
    double rel = ang - s.th0;
    double dir = sweep >= 0 ? 1.0 : -1.0;
    rel *= dir;
    double span = std::abs(sweep);
    rel = std::fmod(rel, 2 * M_PI);
    if (rel < 0) rel += 2 * M_PI;
    if (rel <= span + 1e-13) {
        *sloc = std::min(rel / std::max(span, 1e-300), 1.0);
        return true;
    }
    return false;
}

inline void line_line(const segment& A, const segment& B, std::vector<crossing>& out) {
    cx dA = A.b - A.a, dB = B.b - B.a;
    double det = cross2(dA, dB);
    if (std::abs(det) < 1e-15 * std::abs(dA) * std::abs(dB)) return;
    cx rhs = B.a - A.a;
    double sa = cross2(rhs, dB) / det;
    double sb = cross2(rhs, dA) / det;
    if (sa > 0 && sa < 1 && sb > 0 && sb < 1)
        out.push_back({sa, sb, A.a + sa * dA, det > 0 ? 1.0 : -1.0});
}

inline void line_arc(const segment& L, const segment& A, bool swap, std::vector<crossing>& out) {
    cx d = L.b - L.a;
    cx m = L.a - A.c;
    double a2 = std::norm(d);
    double b2 = 2.0 * (m * std::conj(d)).real();
    double c2 = std::norm(m) - A.rad * A.rad;
    double disc = b2 * b2 - 4 * a2 * c2;
    if (disc <= 0) return;
    double sq = std::sqrt(disc);
    for (double t : {(-b2 - sq) / (2 * a2), (-b2 + sq) / (2 * a2)}) {
        if (t <= 0 || t >= 1) continue;
        cx p = L.a + t * d;
        double ang = std::arg(p - A.c);
        double sarc;
        if (!arc_contains(A, ang, &sarc)) continue;
        if (sarc <= 0 || sarc >= 1) continue;
        cx dArc = A.deriv(sarc);
        double orient = cross2(d, dArc);
        if (swap)
            out.push_back({sarc, t, p, -orient > 0 ? 1.0 : -1.0});
        else
            out.push_back({t, sarc, p, orient > 0 ? 1.0 : -1.0});
    }
}

inline void arc_arc(const segment& A, const segment& B, std::vector<crossing>& out) {
    cx d = B.c - A.c;
    double dist = std::abs(d);
    if (dist < 1e-15) return;  // concentric
    double r1 = A.rad, r2 = B.rad;
    if (dist > r1 + r2 || dist < std::abs(r1 - r2)) return;
    double x = (dist * dist + r1 * r1 - r2 * r2) / (2 * dist);
    double h2 = r1 * r1 - x * x;
    if (h2 <= 0) return;
    double h = std::sqrt(h2);
    cx u = d / dist;
    for (double sgn : {1.0, -1.0}) {
        cx p = A.c + u * cx(x, sgn * h);
        double sa, sb;
        if (!arc_contains(A, std::arg(p - A.c), &sa)) continue;
        if (!arc_contains(B, std::arg(p - B.c), &sb)) continue;
        if (sa <= 0 || sa >= 1 || sb <= 0 || sb >= 1) continue;
        double orient = cross2(A.deriv(sa), B.deriv(sb));
        out.push_back({sa, sb, p, orient > 0 ? 1.0 : -1.0});
    }
}

inline std::vector<crossing> segment_crossings(const segment& A, const segment& B) {
    std::vector<crossing> out;
    if (A.type == segment::kind::line && B.type == segment::kind::line)
        line_line(A, B, out);
    else if (A.type == segment::kind::line)
        line_arc(A, B, false, out);
    else if (B.type == segment::kind::line)
        line_arc(B, A, true, out);
    else
        arc_arc(A, B, out);
    return out;
}

// y-value at a parameter point of a sheet path (tracks from the start).
inline cx y_at(const sheet_path& sp, size_t seg_idx, double sloc) {
    cx y = sp.y_start;
    cx x = sp.path.start();
    auto step_along = [&](const segment& s, double s1) {
        constexpr int K = 24;
        for (int i = 1; i <= K; ++i) {
            cx xn = s.point(s1 * double(i) / K);
            y = continue_y(*sp.curve, x, y, xn);
            x = xn;
        }
    };
    for (size_t k = 0; k < seg_idx; ++k) step_along(sp.path.segs[k], 1.0);
    step_along(sp.path.segs[seg_idx], sloc);
    return y;
}

}  // namespace detail

// Signed intersection number of two closed tracked paths on the same curve.
inline int intersection_number(const sheet_path& A, const sheet_path& B) {
    double tot = 0;
    for (size_t i = 0; i < A.path.segs.size(); ++i) {
        for (size_t j = 0; j < B.path.segs.size(); ++j) {
            for (const auto& cr : detail::segment_crossings(A.path.segs[i], B.path.segs[j])) {
                cx ya = detail::y_at(A, i, cr.sa);
                cx yb = detail::y_at(B, j, cr.sb);
                if (std::abs(ya - yb) < std::abs(ya + yb)) tot += cr.orient;
            }
        }
    }
    return static_cast<int>(std::lround(tot));
}

inline int intersection_number(const cycle& A, const cycle& B) {
    int tot = 0;
    for (const auto& [pa, wa] : A.parts)
        for (const auto& [pb, wb] : B.parts) tot += wa * wb * intersection_number(pa, pb);
    return tot;
}

// ---------------------------------------------------------------------------
// cycle construction
// ---------------------------------------------------------------------------

struct cut {
    cx near_end, far_end;  // a-loop rings both; the b-loop omits far_end
};

struct cycle_set {
    const quotient_curve* curve = nullptr;
    std::vector<cut> cuts;            // cut 0 is {2, r} for odd Y-, else conjugate pairs
    std::vector<cycle> a_cycles;      // one per cut
    std::vector<cycle> b_cycles;      // canonical completions, a_i . b_j = delta_ij
    std::vector<sheet_path> c_paths;  // open; only on the curve carrying them
    std::vector<std::string> a_names, b_names, c_names;
    bool a_crossings_in_window = true;  // item 2 certificate for pair loops
};

namespace detail {

inline double pair_clearance(const quotient_curve& c, cx p, cx q) {
    double d = std::numeric_limits<double>::infinity();
    for (cx b : c.branch) {
        if (std::abs(b - p) < 1e-14 || std::abs(b - q) < 1e-14) continue;
        d = std::min(d, segment::line(p, q).distance_to(b));
    }
    if (!std::isfinite(d)) d = 1.0 + std::abs(q - p);
    double len = std::abs(q - p);
    double clr = std::min(0.45 * d, std::max(0.75 * len, 0.1 * d));
    // keep the axis crossings of conjugate-pair loops inside (-2, 2) when possible
    double mid = 0.5 * (p + q).real();
    double window = std::min(std::abs(mid - 2.0), std::abs(mid + 2.0));
    if (window > 0.05 * d) clr = std::min(clr, 0.8 * window);
    if (!(clr > 0)) throw geometry_error("branch points too crowded");
    return clr;
}

}  // namespace detail

// a-cycles: loops ringing each cut, lifted by the stated seed conventions.
//  - odd Y-: a_0 rings {2, r}; lift has y_- > 0 at the upward axis crossing.
//  - pair loops a_i: upward crossing lifted to y/i < 0 on Y+ (odd), y > 0 on Y- (odd).
//  - even family mirrors with the roles of the two curves swapped.
inline cycle_set build_a_cycles(const branch_configuration& cfg, const quotient_curve& curve) {
    cycle_set cs;
    cs.curve = &curve;
    bool odd = cfg.family == family_kind::odd;
    bool is_minus = curve.sign == curve_sign::minus;

    if (odd && is_minus) cs.cuts.push_back({cx(2.0), cx(cfg.r)});
    for (int i = 0; i < cfg.n; ++i) {
        cx x1 = cfg.x[2 * i], x2 = cfg.x[2 * i + 1];
        // orient the cut so the loop's upward crossing rule is deterministic:
        // lower endpoint first (pairs), far endpoint = x_{2i}
        cs.cuts.push_back({x1, x2});
    }

    seed_rule rule;
    if (odd)
        rule = is_minus ? seed_rule::y_positive : seed_rule::y_over_i_negative;
    else
        rule = is_minus ? seed_rule::y_over_i_negative : seed_rule::y_positive;

    for (size_t k = 0; k < cs.cuts.size(); ++k) {
        const cut& ct = cs.cuts[k];
        bool horizontal = std::abs(ct.near_end.imag()) < 1e-13 && std::abs(ct.far_end.imag()) < 1e-13;
        double clr = detail::pair_clearance(curve, ct.near_end, ct.far_end);
        planar_path loop;
        if (horizontal) {
            double lo = std::min(ct.near_end.real(), ct.far_end.real());
            double hi = std::max(ct.near_end.real(), ct.far_end.real());
            loop = horizontal_pair_loop(lo, hi, clr);
        } else {
            // conjugate-ish pair: lower endpoint first so the right wall ascends
            cx lo = ct.near_end.imag() <= ct.far_end.imag() ? ct.near_end : ct.far_end;
            cx hi = ct.near_end.imag() <= ct.far_end.imag() ? ct.far_end : ct.near_end;
            loop = pair_loop(lo, hi, clr);
        }
        sheet_path sp;
        try {
            sp = trace_sheet(curve, loop, rule);
        } catch (const lift_error&) {
            // stated lift convention inapplicable (crossing outside the window where the
            // branch value has the required type); fall back to the principal sheet
            sp = trace_sheet(curve, loop, seed_rule::explicit_value,
                             curve.y_principal(loop.start()));
        }
        if (!horizontal) {
            double xc = loop.start().real();
            if (!(xc > -2.0 && xc < 2.0)) cs.a_crossings_in_window = false;
        }
        cs.a_cycles.push_back(cycle(sp));
        cs.a_names.push_back((odd && is_minus) ? "a_" + std::to_string(k) : "a_" + std::to_string(k + 1));
    }
    if (!(odd && is_minus))
        for (size_t k = 0; k < cs.a_names.size(); ++k) cs.a_names[k] = "a_" + std::to_string(k + 1);
    return cs;
}

// c-paths (open).  Odd family, on Y+: c_1 from x=2 around {r}; c_{-1} from x=-2 around
// {r, x_1..x_2n}.  Even family: c_1 on Y+ from x=2 around {-2}; c_{-1} on Y- from x=-2
// around {2}.  All begin on the sheet with y/i < 0 where that applies.
inline void build_c_paths(const branch_configuration& cfg, const quotient_curve& curve,
                          cycle_set& cs) {
    bool odd = cfg.family == family_kind::odd;
    auto clearance_at = [&](cx target) {
        double d = std::numeric_limits<double>::infinity();
        for (cx b : curve.branch)
            if (std::abs(b - target) > 1e-14) d = std::min(d, std::abs(b - target));
        for (cx s : {cx(2.0), cx(-2.0)})  // keep clear of the c-path endpoints
            if (std::abs(s - target) > 1e-14) d = std::min(d, std::abs(s - target));
        return 0.3 * d;
    };

    if (odd && curve.sign == curve_sign::plus) {
        // direct lasso around r when the corridor is clear, else route over the cloud
        bool blocked = false;
        for (cx xi : cfg.x)
            if (segment::line(cx(2.0), cx(cfg.r)).distance_to(xi) < 0.8 * clearance_at(cfg.r))
                blocked = true;
        planar_path c1;
        if (!blocked) {
            c1 = lasso_path(cx(2.0), cx(cfg.r), clearance_at(cfg.r));
        } else {
            std::vector<cx> avoid = curve.branch;
            avoid.push_back(cx(2.0));
            c1 = hub_lasso_path(cx(2.0), {cx(cfg.r)}, avoid);
        }
        for (cx xi : cfg.x)
            if (c1.winding(xi) != 0) throw geometry_error("c_1 winds a pair branch point");
        cs.c_paths.push_back(trace_sheet(curve, c1, seed_rule::y_over_i_negative));
        cs.c_names.push_back("c_1");

        // c_{-1}: winds once around r and every x_i
        std::vector<cx> avoid = curve.branch;
        avoid.push_back(cx(2.0));
        avoid.push_back(cx(-2.0));
        planar_path cm1 = hub_lasso_path(cx(-2.0), curve.branch, avoid);
        for (cx b : curve.branch)
            if (cm1.winding(b) != 1) throw geometry_error("c_{-1} winding certificate failed");
        cs.c_paths.push_back(trace_sheet(curve, cm1, seed_rule::y_over_i_negative));
        cs.c_names.push_back("c_-1");
    } else if (!odd) {
        if (curve.sign == curve_sign::plus) {
            planar_path c1 = lasso_path(cx(2.0), cx(-2.0), clearance_at(-2.0));
            cs.c_paths.push_back(trace_sheet(curve, c1, seed_rule::y_positive));
            cs.c_names.push_back("c_1");
        } else {
            planar_path cm1 = lasso_path(cx(-2.0), cx(2.0), clearance_at(2.0));
            cs.c_paths.push_back(trace_sheet(curve, cm1, seed_rule::y_over_i_negative));
            cs.c_names.push_back("c_-1");
        }
    }
}

// b-cycles: keyhole loops winding once around every finite branch point except the
// distinguished far endpoint of their cut, then symplectically normalized against the
// a-cycles (orientation by seed flip, residues by appended a-loops).
inline void build_b_cycles(const branch_configuration& cfg, cycle_set& cs) {
    const quotient_curve& curve = *cs.curve;
    cx centroid = std::accumulate(curve.branch.begin(), curve.branch.end(), cx(0.0)) /
                  double(curve.branch.size());
    double spread = 0.0;
    for (cx b : curve.branch) spread = std::max(spread, std::abs(b - centroid));
    spread = std::max({spread, std::abs(cx(2.0) - centroid), std::abs(cx(-2.0) - centroid)});

    for (size_t j = 0; j < cs.cuts.size(); ++j) {
        cx e = cs.cuts[j].far_end;
        double rout = spread * (1.55 + 0.09 * double(j));

        // rank candidate channel directions by clearance to the other branch points
        std::vector<std::pair<double, double>> angles;  // (clearance, angle)
        for (int k = 0; k < 180; ++k) {
            double ang = 2 * M_PI * k / 180.0 + 0.013;
            cx far = e + 2.0 * rout * std::polar(1.0, ang);
            double d = std::numeric_limits<double>::infinity();
            for (cx b : curve.branch)
                if (std::abs(b - e) > 1e-14) d = std::min(d, segment::line(e, far).distance_to(b));
            angles.emplace_back(d, ang);
        }
        std::sort(angles.rbegin(), angles.rend());

        bool done = false;
        std::string fail = "no clear channel for b-cycle";
        for (int attempt = 0; attempt < 24 && !done; ++attempt) {
            double best = angles[attempt].first, best_ang = angles[attempt].second;
            if (best <= 0) break;
            double cap = std::min(0.3 * best, 0.25 * std::abs(e - cs.cuts[j].near_end));
            double alpha = 0.9;  // half-opening of the channel mouth on the cap circle
            cx dir = std::polar(1.0, best_ang);

            cx exit1 = e + cap * std::polar(1.0, best_ang - alpha);
            cx exit2 = e + cap * std::polar(1.0, best_ang + alpha);
            // clip walls (parallel to dir) to the outer circle centered at the centroid
            auto clip = [&](cx from) {
                double B = 2 * ((from - centroid) * std::conj(dir)).real();
                double C = std::norm(from - centroid) - rout * rout;
                double disc = B * B - 4 * C;
                double t = (-B + std::sqrt(std::max(disc, 0.0))) / 2;
                return from + t * dir;
            };
            cx o1 = clip(exit1), o2 = clip(exit2);
            double a1 = std::arg(o1 - centroid), a2 = std::arg(o2 - centroid);
            while (a1 <= a2) a1 += 2 * M_PI;  // ccw outer arc o2 -> o1 avoiding the mouth

            // ccw boundary of (outer disk) minus (channel strip + cap disk):
            // cap from exit1 the back way to exit2, wall out, outer arc, wall back in
            planar_path key;
            key.closed = true;
            key.append(segment::arc(e, cap, best_ang - alpha, best_ang + alpha - 2 * M_PI));
            key.append(segment::line(exit2, o2));
            key.append(segment::arc(centroid, rout, a2, a1));
            key.append(segment::line(o1, exit1));

            try {
                for (cx b : curve.branch) {
                    int want = (std::abs(b - e) < 1e-14) ? 0 : 1;
                    if (key.winding(b) != want)
                        throw geometry_error("b-cycle winding certificate failed");
                }
                // +-2 are branch points of the sigma cover; the lift closes only if the
                // loop winds around both (or neither) -- the outer circle encloses both.
                if (key.winding(cx(2.0)) + key.winding(cx(-2.0)) == 1)
                    throw geometry_error("b-cycle splits x=+-2; sigma lift would not close");

                sheet_path sp = trace_sheet(curve, key, seed_rule::explicit_value,
                                            curve.y_principal(key.start()));
                cycle bj(sp);
                int self = intersection_number(cs.a_cycles[j], bj);
                if (self == -1) {
                    bj = cycle(trace_sheet(curve, key, seed_rule::explicit_value,
                                           -curve.y_principal(key.start())));
                    self = intersection_number(cs.a_cycles[j], bj);
                }
                if (self != 1) throw geometry_error("a_j . b_j != +-1");
                for (size_t i = 0; i < cs.a_cycles.size(); ++i)
                    if (i != j && intersection_number(cs.a_cycles[i], bj) != 0)
                        throw geometry_error("channel crosses another a-cycle");
                cs.b_cycles.push_back(std::move(bj));
                cs.b_names.push_back("b_" + cs.a_names[j].substr(2));
                done = true;
            } catch (const geometry_error& ge) {
                fail = ge.what();
            }
        }
        if (!done) throw geometry_error(fail);
    }
    // b_i . b_j corrections: append a-loops (b_j += m * a_i shifts b_i.b_j by m * (b_i.a_i))
    for (size_t i = 0; i < cs.b_cycles.size(); ++i) {
        for (size_t j = i + 1; j < cs.b_cycles.size(); ++j) {
            int v = intersection_number(cs.b_cycles[i], cs.b_cycles[j]);
            if (v != 0) {
                // b_i . (b_j + m a_i) = v + m * (b_i . a_i) = v - m
                for (auto& [sp, wgt] : cs.a_cycles[i].parts)
                    cs.b_cycles[j].parts.emplace_back(sp, wgt * v);
                if (intersection_number(cs.b_cycles[i], cs.b_cycles[j]) != 0)
                    throw geometry_error("b_i . b_j correction failed");
            }
        }
    }
}

inline cycle_set build_cycles(const branch_configuration& cfg, const quotient_curve& curve) {
    cycle_set cs = build_a_cycles(cfg, curve);
    build_c_paths(cfg, curve, cs);
    build_b_cycles(cfg, cs);
    return cs;
}

}  // namespace spectral_torus
