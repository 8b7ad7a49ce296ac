// path.hpp - planar contours in the x-plane: segments, winding certificates, loop builders.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "spectral_torus/curve.hpp"
#include "spectral_torus/errors.hpp"

namespace spectral_torus {

struct segment {
    enum class kind { line, arc } type = kind::line;
    // line: from a to b.  arc: center c, radius rad, angle th0 -> th1 (signed sweep).
    cx a, b, c;
    double rad = 0.0, th0 = 0.0, th1 = 0.0;

    static segment line(cx from, cx to) {
        segment s;
        s.type = kind::line;
        s.a = from;
        s.b = to;
        return s;
    }
    static segment arc(cx center, double radius, double a0, double a1) {
        segment s;
        s.type = kind::arc;
        s.c = center;
        s.rad = radius;
        s.th0 = a0;
        s.th1 = a1;
        s.a = center + radius * std::polar(1.0, a0);
        s.b = center + radius * std::polar(1.0, a1);
        return s;
    }

    cx point(double s) const {
        if (type == kind::line) return a + (b - a) * s;
        return c + rad * std::polar(1.0, th0 + (th1 - th0) * s);
    }
    cx deriv(double s) const {
        if (type == kind::line) return b - a;
        return rad * cx(0.0, 1.0) * (th1 - th0) * std::polar(1.0, th0 + (th1 - th0) * s);
    }
    double length() const {
        if (type == kind::line) return std::abs(b - a);
        return rad * std::abs(th1 - th0);
    }

    double distance_to(cx z) const {
        if (type == kind::line) {
            cx d = b - a;
            double L2 = std::norm(d);
            if (L2 == 0.0) return std::abs(z - a);
            double t = std::clamp(((z - a) * std::conj(d)).real() / L2, 0.0, 1.0);
            return std::abs(z - (a + t * d));
        }
        double ang = std::arg(z - c);
        double lo = std::min(th0, th1), hi = std::max(th0, th1);
        // bring ang into [lo, lo+2pi)
        while (ang < lo) ang += 2 * M_PI;
        while (ang >= lo + 2 * M_PI) ang -= 2 * M_PI;
        if (ang <= hi) return std::abs(std::abs(z - c) - rad);
        return std::min(std::abs(z - point(0.0)), std::abs(z - point(1.0)));
    }
};

struct planar_path {
    std::vector<segment> segs;
    bool closed = false;

    cx start() const { return segs.front().point(0.0); }
    cx end() const { return segs.back().point(1.0); }

    void append(segment s) { segs.push_back(s); }

    planar_path reversed() const {
        planar_path p;
        p.closed = closed;
        for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
            segment s = *it;
            if (s.type == segment::kind::line) {
                std::swap(s.a, s.b);
            } else {
                std::swap(s.th0, s.th1);
                s.a = s.c + s.rad * std::polar(1.0, s.th0);
                s.b = s.c + s.rad * std::polar(1.0, s.th1);
            }
            p.segs.push_back(s);
        }
        return p;
    }

    // Exact winding number by argument accumulation; throws if not near an integer.
    double winding_raw(cx z, int nsub = 256) const {
        double tot = 0.0;
        for (const auto& s : segs) {
            cx prev = s.point(0.0) - z;
            for (int i = 1; i <= nsub; ++i) {
                cx cur = s.point(double(i) / nsub) - z;
                tot += std::arg(cur / prev);
                prev = cur;
            }
        }
        return tot / (2 * M_PI);
    }
    int winding(cx z) const {
        double w = winding_raw(z);
        int k = static_cast<int>(std::lround(w));
        if (std::abs(w - k) > 1e-6)
            throw geometry_error("winding certificate not integral; path may touch the point");
        return k;
    }

    double distance_to(cx z) const {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : segs) d = std::min(d, s.distance_to(z));
        return d;
    }

    double length() const {
        double L = 0;
        for (const auto& s : segs) L += s.length();
        return L;
    }
};

// Closed ccw loop at clearance clr around the segment [p,q] (a "stadium").
// Starts at the far cap of q on the right-hand side of p->q.
inline planar_path stadium_loop(cx p, cx q, double clr) {
    planar_path path;
    path.closed = true;
    if (std::abs(q - p) < 1e-15) {
        double a0 = 0.0;
        path.append(segment::arc(p, clr, a0, a0 + 2 * M_PI));
        return path;
    }
    cx u = (q - p) / std::abs(q - p);
    cx nrm = u * cx(0.0, 1.0);
    double aq = std::arg(-nrm);
    path.append(segment::line(p - nrm * clr, q - nrm * clr));
    path.append(segment::arc(q, clr, aq, aq + M_PI));
    path.append(segment::line(q + nrm * clr, p + nrm * clr));
    path.append(segment::arc(p, clr, aq + M_PI, aq + 2 * M_PI));
    return path;
}

inline planar_path circle_loop(cx center, double radius, bool ccw = true, double t0 = 0.0) {
    planar_path p;
    p.closed = true;
    p.append(segment::arc(center, radius, t0, t0 + (ccw ? 2 : -2) * M_PI));
    return p;
}

// ccw loop around a horizontal pair lo < hi, starting at the upward axis crossing (hi + clr).
inline planar_path horizontal_pair_loop(double lo, double hi, double clr) {
    planar_path loop;
    loop.closed = true;
    loop.append(segment::arc(cx(hi), clr, 0, M_PI / 2));
    loop.append(segment::line(cx(hi, clr), cx(lo, clr)));
    loop.append(segment::arc(cx(lo), clr, M_PI / 2, 3 * M_PI / 2));
    loop.append(segment::line(cx(lo, -clr), cx(hi, -clr)));
    loop.append(segment::arc(cx(hi), clr, -M_PI / 2, 0));
    return loop;
}

// ccw loop around the pair {p, q} starting at the midpoint of the right-hand wall of
// p->q; for a conjugate pair entered lower-first this is the upward axis crossing.
inline planar_path pair_loop(cx p, cx q, double clr) {
    if (std::abs(q - p) < 1e-15) return circle_loop(p, clr);
    cx u = (q - p) / std::abs(q - p);
    cx nrm = u * cx(0.0, 1.0);
    double aq = std::arg(u);
    planar_path path;
    path.closed = true;
    cx mid = 0.5 * (p + q) - nrm * clr;
    path.append(segment::line(mid, q - nrm * clr));
    path.append(segment::arc(q, clr, aq - M_PI / 2, aq + M_PI / 2));
    path.append(segment::line(q + nrm * clr, p + nrm * clr));
    path.append(segment::arc(p, clr, aq + M_PI / 2, aq + 3 * M_PI / 2));
    path.append(segment::line(p - nrm * clr, mid));
    return path;
}

// Open path: from `from`, straight toward `around`, a full ccw circle of radius clr,
// then straight back.  Total winding one around `around`; used for c-paths and
// node-to-node b-representatives.  `via` (optional) inserts a waypoint both ways.
inline planar_path lasso_path(cx from, cx around, double clr, std::vector<cx> via = {}) {
    if (!(clr > 0)) throw geometry_error("lasso clearance must be positive");
    planar_path p;
    cx cur = from;
    for (cx w : via) {
        p.append(segment::line(cur, w));
        cur = w;
    }
    double ang = std::arg(cur - around);
    cx entry = around + clr * std::polar(1.0, ang);
    p.append(segment::line(cur, entry));
    p.append(segment::arc(around, clr, ang, ang + 2 * M_PI));
    for (size_t i = via.size() + 1; i-- > 0;) {
        cx tgt = (i == 0) ? from : via[i - 1];
        p.append(segment::line(p.segs.back().point(1.0), tgt));
    }
    return p;
}

// Open path from `from` that winds once ccw around each target: a vertical run to a
// transit line above everything, then a lasso per target.  Robust whenever the targets
// are separated from the avoid-set.
inline planar_path hub_lasso_path(cx from, const std::vector<cx>& targets,
                                  const std::vector<cx>& avoid) {
    double top = 1.0;
    for (cx t : targets) top = std::max(top, std::abs(t) + 1.0);
    for (cx a : avoid) top = std::max(top, std::abs(a) + 1.0);
    cx hub = cx(from.real(), top * 1.3);
    planar_path p;
    p.append(segment::line(from, hub));
    cx cur = hub;
    for (cx t : targets) {
        double clr = std::numeric_limits<double>::infinity();
        for (cx a : avoid)
            if (std::abs(a - t) > 1e-12) clr = std::min(clr, std::abs(a - t));
        for (cx t2 : targets)
            if (std::abs(t2 - t) > 1e-12) clr = std::min(clr, std::abs(t2 - t));
        if (!std::isfinite(clr)) clr = 1.0;
        clr *= 0.3;
        double ang = std::arg(cur - t);
        cx entry = t + clr * std::polar(1.0, ang);
        p.append(segment::line(cur, entry));
        p.append(segment::arc(t, clr, ang, ang + 2 * M_PI));
        p.append(segment::line(entry, cur));
    }
    p.append(segment::line(hub, from));
    return p;
}

// Closed ccw loop with winding one around exactly the requested subset of branch points
// and zero around the rest, certificate-checked.  delta_branch = minimum clearance; if
// zero, 1e-3 times the minimal pairwise branch distance is used.
inline planar_path make_loop(const std::vector<cx>& branch, const std::vector<size_t>& subset,
                             double delta_branch = 0.0) {
    if (subset.empty()) throw geometry_error("empty branch subset");
    double gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < branch.size(); ++i)
        for (size_t j = 0; j < i; ++j) gap = std::min(gap, std::abs(branch[i] - branch[j]));
    if (branch.size() < 2) gap = 1.0;
    if (delta_branch <= 0) delta_branch = 1e-3 * gap;

    planar_path p;
    if (subset.size() == 1) {
        double clr = std::numeric_limits<double>::infinity();
        cx c = branch[subset[0]];
        for (size_t i = 0; i < branch.size(); ++i)
            if (i != subset[0]) clr = std::min(clr, std::abs(branch[i] - c));
        clr = std::isfinite(clr) ? 0.45 * clr : 1.0;
        p = circle_loop(c, clr);
    } else if (subset.size() == 2) {
        cx a = branch[subset[0]], b = branch[subset[1]];
        double clr = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < branch.size(); ++i)
            if (i != subset[0] && i != subset[1])
                clr = std::min(clr, segment::line(a, b).distance_to(branch[i]));
        clr = std::isfinite(clr) ? 0.45 * clr : 0.6 * std::abs(b - a);
        if (std::abs(a.imag()) < 1e-13 && std::abs(b.imag()) < 1e-13) {
            p = horizontal_pair_loop(std::min(a.real(), b.real()), std::max(a.real(), b.real()),
                                     clr);
        } else {
            if (a.imag() > b.imag()) std::swap(a, b);  // lower endpoint first
            p = pair_loop(a, b, clr);
        }
    } else {
        // hub-joined circles around each member
        cx hub(0.0, 0.0);
        double top = 0.0;
        for (cx z : branch) top = std::max(top, std::abs(z) + 1.0);
        hub = cx(branch[subset[0]].real(), 1.4 * top);
        cx cur = hub;
        for (size_t k : subset) {
            cx c = branch[k];
            double clr = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < branch.size(); ++i)
                if (i != k) clr = std::min(clr, std::abs(branch[i] - c));
            clr *= 0.35;
            double ang = std::arg(cur - c);
            cx entry = c + clr * std::polar(1.0, ang);
            p.append(segment::line(cur, entry));
            p.append(segment::arc(c, clr, ang, ang + 2 * M_PI));
            p.append(segment::line(entry, cur));
        }
        p.closed = true;
    }
    p.closed = true;
    for (size_t i = 0; i < branch.size(); ++i) {
        bool in = std::find(subset.begin(), subset.end(), i) != subset.end();
        if (p.winding(branch[i]) != (in ? 1 : 0))
            throw geometry_error("winding certificate mismatch in make_loop");
        if (p.distance_to(branch[i]) < delta_branch)
            throw geometry_error("branch points too crowded for the requested clearance");
    }
    return p;
}

}  // namespace spectral_torus
