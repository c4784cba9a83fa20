#include "oubridge/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oubridge/errors.hpp"
#include "oubridge/numerics.hpp"

namespace oubridge {

namespace {

// spacing of the psi_1 bundle used by psi_2, relative to the width of D
constexpr double kOuterBundleRel = 3e-3;

const Minimizer& strongly_regular(const ExitSolution& sol) {
    if (sol.regular != Regularity::StronglyRegular)
        throw NotStronglyRegular("start point is " + to_string(sol.regular));
    return sol.minimizers.front();
}

double curvature(const BridgeSpec& spec, Minimizer m, double y, double v) {
    return d2u_dx2_at(spec, {y, v}, m);
}

// exit time of a neighbouring characteristic, continued from `guess`
double track_nu(const BridgeSpec& spec, SpaceTimePoint p, double d, double guess) {
    auto g = [&](double t) { return g_func(spec, p, d, t); };
    const double g0 = g(guess);
    if (g0 == 0.0) return guess;
    double delta = 1e-7 * spec.T;
    for (int it = 0; it < 60; ++it, delta *= 2.0) {
        const double lo = guess - delta, hi = guess + delta;
        const double glo = g(lo), ghi = g(hi);
        if ((glo < 0.0) != (g0 < 0.0)) return num::bisect(g, lo, guess, glo, g0, 0.0);
        if ((ghi < 0.0) != (g0 < 0.0)) return num::bisect(g, guess, hi, g0, ghi, 0.0);
    }
    throw NumericalBlowup("lost track of a neighbouring characteristic");
}

struct Local {
    const BridgeSpec& spec;
    double d;

    double integrate(double a, double b, const std::function<double(double)>& f) const {
        return num::gauss_integrate(f, a, b, 4, 16);
    }

    double w(SpaceTimePoint p, double guess) const {
        const double nu = track_nu(spec, p, d, guess);
        const Minimizer m{d, nu};
        auto f = [&](double t) {
            const double y = pinned_mean(spec.a0, spec.a1, p, {d, nu}, t);
            return 0.5 * curvature(spec, m, y, t);
        };
        return integrate(p.s, nu, f);
    }

    // central 5-point first and second derivative in x of `fn` at p
    template <class F>
    std::pair<double, double> diff(F&& fn, SpaceTimePoint p, double h) const {
        double f[5];
        for (int k = -2; k <= 2; ++k) f[k + 2] = fn(SpaceTimePoint{p.x + k * h, p.s});
        const double d1 = (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * h);
        const double d2 = (-f[4] + 16.0 * f[3] - 30.0 * f[2] + 16.0 * f[1] - f[0]) / (12.0 * h * h);
        return {d1, d2};
    }

    double psi1(SpaceTimePoint p, double guess, double h) const {
        const double nu = track_nu(spec, p, d, guess);
        auto f = [&](double t) {
            const SpaceTimePoint q{pinned_mean(spec.a0, spec.a1, p, {d, nu}, t), t};
            const auto [wx, wxx] = diff([&](SpaceTimePoint r) { return w(r, nu); }, q, h);
            return 0.5 * (wx * wx - wxx);
        };
        return integrate(p.s, nu, f);
    }

    double psi2(SpaceTimePoint p, double guess, double h, double h_outer) const {
        const double nu = track_nu(spec, p, d, guess);
        auto f = [&](double t) {
            const SpaceTimePoint q{pinned_mean(spec.a0, spec.a1, p, {d, nu}, t), t};
            const auto [wx, wxx] = diff([&](SpaceTimePoint r) { return w(r, nu); }, q, h);
            double vals[5];
            for (int k = -2; k <= 2; ++k)
                vals[k + 2] = psi1({q.x + k * h_outer, q.s}, nu, h);
            const double p0 = vals[2];
            const double px = (-vals[4] + 8.0 * vals[3] - 8.0 * vals[1] + vals[0]) / (12.0 * h_outer);
            const double pxx = (-vals[4] + 16.0 * vals[3] - 30.0 * vals[2] + 16.0 * vals[1] - vals[0]) /
                               (12.0 * h_outer * h_outer);
            return 0.5 * (wx * wx - wxx) * p0 - wx * px + 0.5 * pxx;
        };
        return integrate(p.s, nu, f);
    }
};

void check_stencil(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                   const Minimizer& m, double h) {
    for (int k : {-2, 2}) {
        const SpaceTimePoint q{start.x + k * h, start.s};
        if (!domain.contains(q.x)) continue;
        const ExitSolution sol = exit_solution(spec, domain, q);
        if (sol.regular != Regularity::StronglyRegular || sol.minimizers.front().d != m.d) {
            std::ostringstream os;
            os << "bundle stencil point x=" << q.x << " leaves the strongly regular set";
            throw NotStronglyRegular(os.str());
        }
    }
}

}  // namespace

OptimalPath characteristic(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start) {
    const ExitSolution sol = exit_solution(spec, domain, start);
    const Minimizer& m = strongly_regular(sol);
    return OptimalPath(spec, start, m.d, m.nu);
}

double characteristic_residual(const BridgeSpec& spec, const OptimalPath& path, double t) {
    const double y = path(t);
    const double beta = drift(spec, y, t) - du_dx_at(spec, {y, t}, {path.d(), path.t_exit()});
    return path.velocity(t) - beta;
}

double w_term(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start, double tol) {
    const ExitSolution sol = exit_solution(spec, domain, start);
    const Minimizer& m = strongly_regular(sol);
    if (spec.brownian() || sol.deterministic) return 0.0;
    auto f = [&](double t) {
        const double y = pinned_mean(spec.a0, spec.a1, start, {m.d, m.nu}, t);
        return 0.5 * curvature(spec, m, y, t);
    };
    const double w = num::adaptive_simpson(f, start.s, m.nu, tol);
    if (!std::isfinite(w)) {
        std::ostringstream os;
        os << "w quadrature diverged at x=" << start.x << ", s=" << start.s;
        throw NumericalBlowup(os.str());
    }
    return w;
}

std::vector<double> psi_terms(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                              int m, double bundle_rel) {
    if (m < 0 || m > kMaxOrder) throw UnsupportedOrder("supported series order is 0..2");
    const ExitSolution sol = exit_solution(spec, domain, start);
    const Minimizer& mz = strongly_regular(sol);
    std::vector<double> psi(static_cast<std::size_t>(m), 0.0);
    if (m == 0 || spec.brownian() || sol.deterministic) return psi;
    const double h = bundle_rel * domain.width();
    check_stencil(spec, domain, start, mz, h);
    const Local local{spec, mz.d};
    psi[0] = local.psi1(start, mz.nu, h);
    if (m >= 2) {
        const double h_outer = kOuterBundleRel * domain.width();
        check_stencil(spec, domain, start, mz, h_outer);
        psi[1] = local.psi2(start, mz.nu, h, h_outer);
    }
    for (double v : psi)
        if (!std::isfinite(v)) throw NumericalBlowup("psi quadrature diverged");
    return psi;
}

ExpansionResult q_asymptotic(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                             double eps, int m) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
    if (m < 0 || m > kMaxOrder) throw UnsupportedOrder("supported series order is 0..2");
    const ExitSolution sol = exit_solution(spec, domain, start);
    ExpansionResult r;
    r.order = m;
    r.psi.assign(static_cast<std::size_t>(m), 0.0);
    if (sol.regular != Regularity::StronglyRegular)
        throw SeriesInvalidHere("asymptotic series does not hold at a " + to_string(sol.regular) +
                                " point");
    if (sol.deterministic) {
        r.family_a_shortcut = true;
        r.q_approx = 1.0;
        return r;
    }
    r.u = sol.u;
    if (!spec.brownian()) {
        r.w = w_term(spec, domain, start);
        r.psi = psi_terms(spec, domain, start, m);
    }
    double series = 1.0, ek = 1.0;
    for (double p : r.psi) {
        ek *= eps;
        series += ek * p;
    }
    r.log_q = series > 0.0 ? -r.u / eps - r.w + std::log(series)
                           : -std::numeric_limits<double>::infinity();
    double q = std::exp(-r.u / eps - r.w) * series;
    if (q > 1.0 || q < 0.0) {
        r.clamped = true;
        q = std::min(1.0, std::max(0.0, q));
    }
    r.q_approx = q;
    return r;
}

}  // namespace oubridge
