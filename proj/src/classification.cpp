#include "oubridge/classification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oubridge/errors.hpp"
#include "oubridge/numerics.hpp"

namespace oubridge {

using num::near;
using num::sinh_over;

namespace {

const char* roman_numeral(int r) {
    static const char* names[] = {"", "I", "II", "III", "IV", "V", "VI", "VII"};
    return (r >= 0 && r <= 7) ? names[r] : "?";
}

void check_pin(const BridgeSpec& spec, const Domain& domain) {
    if (spec.xT == domain.d1 || spec.xT == domain.d2)
        throw UnsupportedBoundaryPin("terminal pin xT lies on the boundary of D");
}

Family family_of(const BridgeSpec& spec, const Domain& domain) {
    return domain.contains(spec.xT) ? Family::B : Family::A;
}

void check_start(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint p) {
    if (!domain.contains(p.x)) throw DomainError("start point must lie inside D");
    if (!(p.s >= 0.0 && p.s < spec.T)) throw DomainError("start time must lie in [0, T)");
}

// x* = (d + c) cosh(a1 (tc - t)) - c without forming c
double critical_curve(const BridgeSpec& spec, double d, double tc, double t) {
    const double a1 = spec.a1;
    const double h = sinh_over(a1, 0.5 * (tc - t));
    return d * std::cosh(a1 * (tc - t)) + 2.0 * spec.a0 * a1 * h * h;
}

// cosh(a1 (T - t)) (d + c) = xT + c solved for t in (0, T)
double tangency_time(const BridgeSpec& spec, double d) {
    const double c = spec.a0 / spec.a1;
    auto h = [&](double t) { return (d + c) * std::cosh(spec.a1 * (spec.T - t)) - (spec.xT + c); };
    const double h0 = h(0.0), hT = h(spec.T);
    if (h0 * hT > 0.0) throw NumericalBlowup("tangency time is not bracketed in (0, T)");
    return num::bisect(h, 0.0, spec.T, h0, hT, 1e-15);
}

}  // namespace

std::string CaseLabel::to_string() const {
    std::ostringstream os;
    if (brownian) {
        os << "BrownianBridge(family=" << (family == Family::A ? "A" : "B") << ")";
        return os.str();
    }
    os << (family == Family::A ? "A_" : "B_") << roman_numeral(roman);
    if (sub) os << "_" << roman_numeral(sub);
    os << "(mirrored=" << (mirrored ? "true" : "false") << ")";
    return os.str();
}

std::string to_string(MonotoneKind k) {
    switch (k) {
        case MonotoneKind::Increasing: return "Increasing";
        case MonotoneKind::Decreasing: return "Decreasing";
        case MonotoneKind::Constant: return "Constant";
        case MonotoneKind::DownUp: return "DownUp";
        case MonotoneKind::UpDown: return "UpDown";
    }
    return "?";
}

std::string to_string(Region r) {
    static const char* names[] = {"Sigma1",  "Sigma2",  "Sigma3", "Lambda1", "Lambda2",
                                  "Lambda3", "Theta1", "Theta2", "Theta3",  "Whole"};
    return names[static_cast<int>(r)];
}

std::string to_string(Boundary b) {
    switch (b) {
        case Boundary::None: return "None";
        case Boundary::Lower: return "Lower";
        case Boundary::Upper: return "Upper";
    }
    return "?";
}

Monotonicity monotonicity(const BridgeSpec& spec, SpaceTimePoint start) {
    Monotonicity m;
    if (spec.brownian()) {
        if (spec.xT > start.x) m.kind = MonotoneKind::Increasing;
        else if (spec.xT < start.x) m.kind = MonotoneKind::Decreasing;
        else m.kind = MonotoneKind::Constant;
        return m;
    }
    const double p = spec.fixed_point();
    const bool y0 = near(start.x, p), yT0 = near(spec.xT, p);
    const double y = start.x - p, yT = spec.xT - p;
    if (y0 && yT0) {
        m.kind = MonotoneKind::Constant;
        return m;
    }
    if (yT0) {
        m.kind = y > 0.0 ? MonotoneKind::Decreasing : MonotoneKind::Increasing;
        return m;
    }
    if (y0) {
        m.kind = yT > 0.0 ? MonotoneKind::Increasing : MonotoneKind::Decreasing;
        return m;
    }
    if ((y > 0.0) != (yT > 0.0)) {
        m.kind = y > 0.0 ? MonotoneKind::Decreasing : MonotoneKind::Increasing;
        return m;
    }
    const double L = spec.T - start.s;
    const double ch = std::cosh(spec.a1 * L);
    const double r = y / yT;
    const bool up = y > 0.0;
    if (r <= 1.0 / ch) {
        m.kind = up ? MonotoneKind::Increasing : MonotoneKind::Decreasing;
    } else if (r >= ch) {
        m.kind = up ? MonotoneKind::Decreasing : MonotoneKind::Increasing;
    } else {
        m.kind = up ? MonotoneKind::DownUp : MonotoneKind::UpDown;
        const double sh = std::sinh(spec.a1 * L);
        const double tau = std::atanh((r * ch - 1.0) / (r * sh)) / spec.a1;
        m.turning_time = start.s + tau;
    }
    return m;
}

bool omega_contains(const BridgeSpec& spec, SpaceTimePoint point) {
    if (spec.brownian()) return false;
    const double p = spec.fixed_point();
    if (near(spec.xT, p)) return false;
    const double r = (point.x - p) / (spec.xT - p);
    const double ch = std::cosh(spec.a1 * (spec.T - point.s));
    return 1.0 / ch < r && r < ch;
}

Canonical canonicalize(const BridgeSpec& spec, const Domain& domain) {
    Canonical c{spec, domain, false};
    bool flip = false;
    if (family_of(spec, domain) == Family::A) {
        flip = spec.xT < domain.d1;
    } else if (!spec.brownian()) {
        const double p = spec.fixed_point();
        flip = p < spec.xT && !near(p, spec.xT);
    }
    if (flip) c = {spec.reflected(), domain.reflected(), true};
    return c;
}

CaseLabel classify(const BridgeSpec& spec, const Domain& domain) {
    spec.validate();
    domain.validate();
    check_pin(spec, domain);
    CaseLabel label;
    label.family = family_of(spec, domain);
    if (spec.brownian()) {
        label.brownian = true;
        return label;
    }
    const Canonical cn = canonicalize(spec, domain);
    label.mirrored = cn.mirrored;
    const BridgeSpec& cs = cn.spec;
    const double d1 = cn.domain.d1, d2 = cn.domain.d2;
    const double p = cs.fixed_point();
    const double c = -p;
    const double yT = cs.xT + c;
    const double chT = std::cosh(cs.a1 * cs.T);

    if (label.family == Family::A) {
        // xT > d2 > d1
        if (near(p, cs.xT)) {
            label.roman = 2;
        } else if (p > cs.xT) {
            label.roman = 1;
            label.sub = (d2 + c <= yT * chT) ? 1 : 2;
        } else if (near(p, d2)) {
            label.roman = 4;
        } else if (p > d2) {
            label.roman = 3;
        } else if (near(p, d1)) {
            label.roman = 6;
            label.sub = (d2 + c <= yT / chT) ? 1 : 2;
        } else if (p > d1) {
            label.roman = 5;
            label.sub = (d2 + c <= yT / chT) ? 1 : 2;
        } else {
            label.roman = 7;
            if (d2 + c <= yT / chT) label.sub = 1;
            else if (d1 + c <= yT / chT) label.sub = 2;
            else label.sub = 3;
        }
    } else {
        // d2 > xT > d1 and p >= xT
        if (near(p, cs.xT)) {
            label.roman = 4;
        } else if (near(p, d2)) {
            label.roman = 2;
        } else if (p > d2) {
            label.roman = 1;
            label.sub = (d2 + c >= yT / chT) ? 1 : 2;
        } else {
            label.roman = 3;
        }
    }
    return label;
}

CriticalTrajectory critical_trajectory(const BridgeSpec& spec, const Domain& domain,
                                       const CaseLabel& label) {
    const bool a7 = label.is(Family::A, 7, 3);
    const bool b1 = label.is(Family::B, 1, 2);
    if (!a7 && !b1) throw NotApplicable("case " + label.to_string() + " has no critical trajectory");
    const Canonical cn = canonicalize(spec, domain);
    const double d = a7 ? cn.domain.d1 : cn.domain.d2;
    const double tc = tangency_time(cn.spec, d);
    CriticalTrajectory out;
    out.t_crit = tc;
    const BridgeSpec cs = cn.spec;
    const double sign = cn.mirrored ? -1.0 : 1.0;
    out.curve = [cs, d, tc, sign](double t) { return sign * critical_curve(cs, d, tc, t); };
    if (a7) {
        const double d2 = cn.domain.d2;
        auto h = [&](double t) { return critical_curve(cs, d, tc, t) - d2; };
        out.t3 = num::bisect(h, tc, cs.T, h(tc), h(cs.T), 1e-15);
    }
    return out;
}

std::optional<double> tau_star(const BridgeSpec& spec, const Domain& domain) {
    spec.validate();
    domain.validate();
    if (family_of(spec, domain) != Family::B) throw NotApplicable("tau_star needs family B");
    if (spec.brownian()) return std::nullopt;
    const Canonical cn = canonicalize(spec, domain);
    const BridgeSpec& cs = cn.spec;
    const double c = cs.a0 / cs.a1;
    const double yT = cs.xT + c, y1 = cn.domain.d1 + c;
    if (near(cs.xT, -c)) return std::nullopt;
    auto h = [&](double tau) { return yT * std::cosh(0.5 * cs.a1 * (cs.T - tau)) - y1; };
    const double hi = cs.T;
    const double lo = std::max(-1e3 * cs.T, cs.T - 1400.0 / std::abs(cs.a1));
    const double hlo = h(lo), hhi = h(hi);
    if (!std::isfinite(hlo) || hlo * hhi > 0.0) return std::nullopt;
    return num::bisect(h, lo, hi, hlo, hhi, 0.0);
}

Region region_tag(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint point) {
    const CaseLabel label = classify(spec, domain);
    check_start(spec, domain, point);
    if (label.brownian) return Region::Whole;
    const Canonical cn = canonicalize(spec, domain);
    const SpaceTimePoint cp{cn.map(point.x), point.s};

    auto theta = [&]() -> std::optional<Region> {
        if (std::abs(cp.x - cn.spec.xT) > kPartitionTol) return std::nullopt;
        const auto ts = tau_star(spec, domain);
        if (!ts) return Region::Theta3;
        if (std::abs(point.s - *ts) <= kPartitionTol) return Region::Theta2;
        return point.s < *ts ? Region::Theta1 : Region::Theta3;
    };

    if (label.is(Family::A, 7, 3)) {
        if (!omega_contains(cn.spec, cp)) return Region::Sigma3;
        const CriticalTrajectory ct = critical_trajectory(spec, domain, label);
        const double diff = cp.x - cn.map(ct.curve(point.s));
        if (std::abs(diff) <= kPartitionTol) return Region::Sigma2;
        return diff < 0.0 ? Region::Sigma1 : Region::Sigma3;
    }
    if (label.is(Family::B, 1, 2)) {
        if (omega_contains(cn.spec, cp)) {
            const CriticalTrajectory ct = critical_trajectory(spec, domain, label);
            const double diff = cp.x - cn.map(ct.curve(point.s));
            if (std::abs(diff) <= kPartitionTol) return Region::Lambda2;
            if (diff > 0.0) return Region::Lambda1;
        }
        if (auto th = theta(); th && *th != Region::Theta3) return *th;
        return Region::Lambda3;
    }
    if (label.family == Family::B && label.roman != 4) {
        if (auto th = theta()) return *th;
        return Region::Theta3;
    }
    return Region::Whole;
}

DeterministicExit deterministic_exit(const BridgeSpec& spec, const Domain& domain,
                                     SpaceTimePoint start) {
    spec.validate();
    domain.validate();
    check_start(spec, domain, start);
    const Monotonicity m = monotonicity(spec, start);
    DeterministicExit out;
    auto f = [&](double t) { return flow(spec, start, t); };

    auto seek = [&](double a, double b, bool increasing) -> bool {
        const double d = increasing ? domain.d2 : domain.d1;
        const double fb = f(b);
        const bool crosses = increasing ? fb >= d : fb <= d;
        if (!crosses) return false;
        auto g = [&](double t) { return f(t) - d; };
        out.tau0 = num::bisect(g, a, b, g(a), fb - d, 0.0);
        out.boundary = increasing ? Boundary::Upper : Boundary::Lower;
        return true;
    };

    switch (m.kind) {
        case MonotoneKind::Constant:
            return out;
        case MonotoneKind::Increasing:
        case MonotoneKind::Decreasing:
            seek(start.s, spec.T, m.kind == MonotoneKind::Increasing);
            return out;
        case MonotoneKind::DownUp:
        case MonotoneKind::UpDown: {
            const bool first_up = m.kind == MonotoneKind::UpDown;
            const double t1 = *m.turning_time;
            const double d = first_up ? domain.d2 : domain.d1;
            if (std::abs(f(t1) - d) <= kPartitionTol) {
                out.tau0 = t1;
                out.boundary = first_up ? Boundary::Upper : Boundary::Lower;
                out.tangential = true;
                return out;
            }
            if (seek(start.s, t1, first_up)) return out;
            seek(t1, spec.T, !first_up);
            return out;
        }
    }
    return out;
}

}  // namespace oubridge
