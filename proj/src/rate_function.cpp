#include "oubridge/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oubridge/errors.hpp"
#include "oubridge/numerics.hpp"

namespace oubridge {

using num::sinh_over;

namespace {

void check_start(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint p) {
    if (!domain.contains(p.x)) throw DomainError("start point must lie inside D");
    if (!(p.s >= 0.0 && p.s < spec.T)) throw DomainError("start time must lie in [0, T)");
}

// |g| reference used for the degeneracy and double-root thresholds
double g_scale(const BridgeSpec& spec, SpaceTimePoint start, double d) {
    const auto [gs, gT] = g_endpoints(spec, start, d);
    return std::max({std::abs(gs), std::abs(gT), std::numeric_limits<double>::min()});
}

ExitSolution deterministic_solution(const Domain& domain, const DeterministicExit& det) {
    ExitSolution sol;
    sol.deterministic = true;
    sol.u = 0.0;
    const double d = det.boundary == Boundary::Lower ? domain.d1 : domain.d2;
    if (det.boundary == Boundary::Lower) sol.u1 = 0.0;
    else sol.u2 = 0.0;
    sol.minimizers.push_back({d, det.tau0});
    if (det.tangential) {
        sol.regular = Regularity::DegenerateMinimizer;
    } else {
        sol.regular = Regularity::StronglyRegular;
        sol.du_dx = 0.0;
        sol.d2u_dx2 = 0.0;
    }
    return sol;
}

ExitSolution brownian_solution(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start) {
    const double x = start.x, s = start.s, T = spec.T, xT = spec.xT;
    const double d1 = domain.d1, d2 = domain.d2;
    const double L = T - s;
    ExitSolution sol;
    const double u1 = 2.0 * (x - d1) * (xT - d1) / L;
    const double u2 = 2.0 * (d2 - x) * (d2 - xT) / L;
    const Minimizer m1{d1, s + L * (x - d1) / (x + xT - 2.0 * d1)};
    const Minimizer m2{d2, s + L * (d2 - x) / (2.0 * d2 - x - xT)};
    sol.u1 = u1;
    sol.u2 = u2;
    sol.u = std::min(u1, u2);
    const double tol = kTieTol * std::max(1.0, sol.u);
    if (std::abs(u1 - u2) <= tol) {
        sol.minimizers = {m1, m2};
        sol.regular = Regularity::MultipleMinimizers;
        return sol;
    }
    sol.regular = Regularity::StronglyRegular;
    if (u1 < u2) {
        sol.minimizers = {m1};
        sol.du_dx = 2.0 * (xT - d1) / L;
    } else {
        sol.minimizers = {m2};
        sol.du_dx = -2.0 * (d2 - xT) / L;
    }
    sol.d2u_dx2 = 0.0;
    return sol;
}

}  // namespace

std::string to_string(Regularity r) {
    switch (r) {
        case Regularity::StronglyRegular: return "StronglyRegular";
        case Regularity::MultipleMinimizers: return "MultipleMinimizers";
        case Regularity::DegenerateMinimizer: return "DegenerateMinimizer";
    }
    return "?";
}

PointToPointAction action(const BridgeSpec& spec, SpaceTimePoint start, double d, double t) {
    if (!(t > start.s) || t > spec.T) throw DomainError("action needs s < t <= T");
    PointToPointAction out{0.0, d, t};
    if (t == spec.T) {
        out.value = d == spec.xT ? 0.0 : std::numeric_limits<double>::infinity();
        return out;
    }
    const double a1 = spec.a1;
    const double gap = d - flow(spec, start, t);
    out.value = sinh_over(a1, spec.T - start.s) * gap * gap /
                (2.0 * sinh_over(a1, spec.T - t) * sinh_over(a1, t - start.s));
    return out;
}

double g_func(const BridgeSpec& spec, SpaceTimePoint start, double d, double t) {
    const double a1 = spec.a1, T = spec.T, s = start.s;
    double g = d * sinh_over(a1, 2.0 * t - T - s) + start.x * sinh_over(a1, T - t) -
               spec.xT * sinh_over(a1, t - s);
    if (spec.a0 != 0.0 && a1 != 0.0)
        g -= 4.0 * spec.a0 * a1 * sinh_over(a1, t - 0.5 * (T + s)) * sinh_over(a1, 0.5 * (t - s)) *
             sinh_over(a1, 0.5 * (T - t));
    return g;
}

double dg_dt(const BridgeSpec& spec, SpaceTimePoint start, double d, double t) {
    const double a1 = spec.a1, T = spec.T, s = start.s;
    double gt = 2.0 * d * std::cosh(a1 * (2.0 * t - T - s)) - start.x * std::cosh(a1 * (T - t)) -
                spec.xT * std::cosh(a1 * (t - s));
    if (spec.a0 != 0.0 && a1 != 0.0) {
        const double m = t - 0.5 * (T + s), p = 0.5 * (t - s), q = 0.5 * (T - t);
        const double Sm = sinh_over(a1, m), Sp = sinh_over(a1, p), Sq = sinh_over(a1, q);
        const double Cm = std::cosh(a1 * m), Cp = std::cosh(a1 * p), Cq = std::cosh(a1 * q);
        gt -= 4.0 * spec.a0 * a1 * (Cm * Sp * Sq + 0.5 * Sm * Cp * Sq - 0.5 * Sm * Sp * Cq);
    }
    return gt;
}

std::pair<double, double> g_endpoints(const BridgeSpec& spec, SpaceTimePoint start, double d) {
    const double L = sinh_over(spec.a1, spec.T - start.s);
    return {L * (start.x - d), L * (d - spec.xT)};
}

std::vector<GRoot> g_roots(const BridgeSpec& spec, SpaceTimePoint start, double d) {
    const double s = start.s, T = spec.T, L = T - s;
    const double scale = g_scale(spec, start, d);
    const double scale_t = scale / L;
    auto g = [&](double t) { return g_func(spec, start, d, t); };
    std::vector<double> ts(kRootScan + 1), gs(kRootScan + 1);
    for (int i = 0; i <= kRootScan; ++i) {
        ts[i] = (i == kRootScan) ? T : s + L * static_cast<double>(i) / kRootScan;
        gs[i] = g(ts[i]);
    }
    std::vector<GRoot> roots;
    auto push = [&](double t, bool tangent) {
        const bool flat = std::abs(dg_dt(spec, start, d, t)) < kDegenerateTol * scale_t;
        roots.push_back({t, (tangent || flat) ? 2 : 1});
    };
    for (int i = 0; i < kRootScan; ++i) {
        if (gs[i] == 0.0) {
            if (i > 0) push(ts[i], false);
            continue;
        }
        if ((gs[i] < 0.0) != (gs[i + 1] < 0.0) && gs[i + 1] != 0.0)
            push(num::bisect(g, ts[i], ts[i + 1], gs[i], gs[i + 1], 0.0), false);
    }
    for (int i = 1; i < kRootScan; ++i) {
        const double a = std::abs(gs[i]);
        if (gs[i] == 0.0 || a > std::abs(gs[i - 1]) || a > std::abs(gs[i + 1])) continue;
        if ((gs[i - 1] < 0.0) != (gs[i] < 0.0) || (gs[i + 1] < 0.0) != (gs[i] < 0.0)) continue;
        const double tm = num::golden_min([&](double t) { return std::abs(g(t)); }, ts[i - 1], ts[i + 1]);
        if (std::abs(g(tm)) < kDegenerateTol * scale &&
            std::abs(dg_dt(spec, start, d, tm)) < kDegenerateTol * scale_t)
            push(tm, true);
    }
    std::sort(roots.begin(), roots.end(), [](const GRoot& a, const GRoot& b) { return a.t < b.t; });
    return roots;
}

double du_dx_at(const BridgeSpec& spec, SpaceTimePoint start, Minimizer m) {
    return -(m.d - flow(spec, start, m.nu)) / sinh_over(spec.a1, m.nu - start.s);
}

double d2u_dx2_at(const BridgeSpec& spec, SpaceTimePoint start, Minimizer m) {
    const double a1 = spec.a1;
    if (a1 == 0.0) return 0.0;
    const double sT = sinh_over(a1, spec.T - m.nu);
    return -2.0 * a1 * (a1 * m.d + spec.a0) * sT * sT /
           (sinh_over(a1, spec.T - start.s) * dg_dt(spec, start, m.d, m.nu));
}

ExitSolution exit_solution(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start) {
    classify(spec, domain);
    check_start(spec, domain, start);
    const DeterministicExit det = deterministic_exit(spec, domain, start);
    if (det.exits()) return deterministic_solution(domain, det);
    if (spec.brownian()) return brownian_solution(spec, domain, start);

    struct Cand {
        double d, nu, value;
        int multiplicity;
    };
    std::vector<Cand> side[2];
    const double ds[2] = {domain.d1, domain.d2};
    for (int k = 0; k < 2; ++k) {
        for (const GRoot& r : g_roots(spec, start, ds[k]))
            side[k].push_back({ds[k], r.t, action(spec, start, ds[k], r.t).value, r.multiplicity});
        if (side[k].empty()) throw NumericalBlowup("no stationary exit time found on one side of D");
    }
    auto side_min = [](const std::vector<Cand>& v) {
        double m = std::numeric_limits<double>::infinity();
        for (const Cand& c : v) m = std::min(m, c.value);
        return m;
    };
    ExitSolution sol;
    sol.u1 = side_min(side[0]);
    sol.u2 = side_min(side[1]);
    sol.u = std::min(*sol.u1, *sol.u2);
    const double tol = kTieTol * std::max(1.0, sol.u);

    std::vector<Cand> best;
    for (int k = 0; k < 2; ++k)
        for (const Cand& c : side[k]) {
            if (c.value - sol.u > tol) continue;
            const bool dup = std::any_of(best.begin(), best.end(), [&](const Cand& b) {
                return b.d == c.d && std::abs(b.nu - c.nu) <= 1e-9;
            });
            if (!dup) best.push_back(c);
        }
    for (const Cand& c : best) sol.minimizers.push_back({c.d, c.nu});

    // pitchfork-side selection rule, asserted against the exhaustive comparison
    const Canonical cn = canonicalize(spec, domain);
    const int pk = cn.mirrored ? 1 : 0;
    const auto& pside = side[pk];
    if (pside.size() > 1 && start.x != spec.xT) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < pside.size(); ++i)
            if (pside[i].value < pside[arg].value) arg = i;
        const bool below = cn.map(start.x) < cn.spec.xT;
        const std::size_t expect = below ? 0 : pside.size() - 1;
        if (arg != expect) {
            std::ostringstream os;
            os << "selection rule picks root " << expect << " but the smallest action is at root "
               << arg << " (x=" << start.x << ", s=" << start.s << ")";
            sol.diagnostics.push_back(os.str());
        }
    }

    if (best.size() > 1) {
        sol.regular = Regularity::MultipleMinimizers;
        return sol;
    }
    const Cand& m = best.front();
    const double scale_t = g_scale(spec, start, m.d) / (spec.T - start.s);
    if (m.multiplicity == 2 || std::abs(dg_dt(spec, start, m.d, m.nu)) < kDegenerateTol * scale_t) {
        sol.regular = Regularity::DegenerateMinimizer;
        return sol;
    }
    sol.regular = Regularity::StronglyRegular;
    sol.du_dx = du_dx_at(spec, start, {m.d, m.nu});
    sol.d2u_dx2 = d2u_dx2_at(spec, start, {m.d, m.nu});
    return sol;
}

std::pair<double, double> du_derivatives(const BridgeSpec& spec, const Domain& domain,
                                         SpaceTimePoint start) {
    const ExitSolution sol = exit_solution(spec, domain, start);
    if (sol.regular != Regularity::StronglyRegular)
        throw NotStronglyRegular("point is " + to_string(sol.regular));
    return {*sol.du_dx, *sol.d2u_dx2};
}

OptimalPath::OptimalPath(const BridgeSpec& spec, SpaceTimePoint start, double d, double t_exit)
    : spec_(spec), start_(start), d_(d), t_exit_(t_exit) {}

double OptimalPath::operator()(double v) const {
    if (v == start_.s) return start_.x;
    if (v == t_exit_) return d_;
    return pinned_mean(spec_.a0, spec_.a1, start_, {d_, t_exit_}, v);
}

double OptimalPath::velocity(double v) const {
    return pinned_mean_rate(spec_.a0, spec_.a1, start_, {d_, t_exit_}, v);
}

double OptimalPath::momentum(double v) const {
    return velocity(v) - drift(spec_, (*this)(v), v);
}

double OptimalPath::hamiltonian(double v) const {
    const double a = momentum(v);
    return drift(spec_, (*this)(v), v) * a + 0.5 * a * a;
}

OptimalPath optimal_path(const BridgeSpec& spec, SpaceTimePoint start, double d, double t) {
    if (!(start.s < t && t < spec.T)) throw DomainError("optimal_path needs s < t < T");
    return OptimalPath(spec, start, d, t);
}

}  // namespace oubridge
