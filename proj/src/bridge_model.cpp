#include "oubridge/bridge_model.hpp"

#include <cmath>
#include <sstream>

#include "oubridge/errors.hpp"
#include "oubridge/numerics.hpp"

namespace oubridge {

using num::sinh_over;

double BridgeSpec::fixed_point() const {
    if (a1 == 0.0) throw NotApplicable("fixed point undefined for a1 = 0");
    return -a0 / a1;
}

void BridgeSpec::validate() const {
    if (!std::isfinite(a0) || !std::isfinite(a1) || !std::isfinite(T) || !std::isfinite(xT))
        throw DomainError("bridge coefficients must be finite");
    if (!(T > 0.0)) throw DomainError("horizon T must be positive");
}

void Domain::validate() const {
    if (!std::isfinite(d1) || !std::isfinite(d2)) throw DomainError("domain ends must be finite");
    if (!(d1 < d2)) {
        std::ostringstream os;
        os << "domain needs d1 < d2, got (" << d1 << ", " << d2 << ")";
        throw DomainError(os.str());
    }
}

double pinned_mean(double a0, double a1, SpaceTimePoint from, SpaceTimePoint to, double v) {
    const double s = from.s, t = to.s;
    const double L = sinh_over(a1, t - s);
    const double lin = from.x * (sinh_over(a1, t - v) / L) + to.x * (sinh_over(a1, v - s) / L);
    if (a0 == 0.0 || a1 == 0.0) return lin;
    const double off = 2.0 * a0 * a1 * sinh_over(a1, 0.5 * (t - v)) * sinh_over(a1, 0.5 * (v - s)) /
                       std::cosh(0.5 * a1 * (t - s));
    return lin - off;
}

double pinned_mean_rate(double a0, double a1, SpaceTimePoint from, SpaceTimePoint to, double v) {
    const double s = from.s, t = to.s;
    const double L = sinh_over(a1, t - s);
    const double lin = (-from.x * std::cosh(a1 * (t - v)) + to.x * std::cosh(a1 * (v - s))) / L;
    if (a0 == 0.0 || a1 == 0.0) return lin;
    return lin - a0 * a1 * sinh_over(a1, 0.5 * (t + s) - v) / std::cosh(0.5 * a1 * (t - s));
}

double drift(const BridgeSpec& spec, double x, double t) {
    const double tau = spec.T - t;
    if (!(tau > 0.0)) throw DomainError("drift is undefined at t >= T");
    double b = (spec.xT - x * std::cosh(spec.a1 * tau)) / sinh_over(spec.a1, tau);
    if (spec.a0 != 0.0) b -= spec.a0 * std::tanh(0.5 * spec.a1 * tau);
    return b;
}

double flow(const BridgeSpec& spec, SpaceTimePoint start, double t) {
    if (!(start.s <= t && t <= spec.T)) throw DomainError("flow needs s <= t <= T");
    if (t == spec.T) return spec.xT;
    if (t == start.s) return start.x;
    return pinned_mean(spec.a0, spec.a1, start, {spec.xT, spec.T}, t);
}

double flow_velocity(const BridgeSpec& spec, SpaceTimePoint start, double t) {
    return pinned_mean_rate(spec.a0, spec.a1, start, {spec.xT, spec.T}, t);
}

MeanCov mean_cov(const BridgeSpec& spec, SpaceTimePoint start, double v, double t, double eps) {
    if (!(start.s <= v && v <= t && t <= spec.T))
        throw DomainError("mean_cov needs s <= v <= t <= T");
    if (!(start.s < spec.T)) throw DomainError("start time must precede T");
    MeanCov out{};
    out.mean_v = flow(spec, start, v);
    out.mean_t = flow(spec, start, t);
    const double a1 = spec.a1;
    out.cov = eps * sinh_over(a1, v - start.s) * sinh_over(a1, spec.T - t) /
              sinh_over(a1, spec.T - start.s);
    return out;
}

double transition_variance(const BridgeSpec& spec, double t_from, double t_to) {
    const double a1 = spec.a1;
    return sinh_over(a1, t_to - t_from) * sinh_over(a1, spec.T - t_to) /
           sinh_over(a1, spec.T - t_from);
}

}  // namespace oubridge
