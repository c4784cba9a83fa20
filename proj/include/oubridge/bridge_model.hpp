#pragma once

#include <utility>

namespace oubridge {

/// dx = (a0 + a1 x) dt + sqrt(eps) dW pinned at x(T) = xT.
struct BridgeSpec {
    double a0 = 0.0;
    double a1 = 0.0;
    double T = 1.0;
    double xT = 0.0;

    bool brownian() const { return a1 == 0.0; }
    /// -a0/a1; throws NotApplicable when a1 == 0
    double fixed_point() const;
    /// throws DomainError on T <= 0 or non-finite coefficients
    void validate() const;
    /// x -> -x
    BridgeSpec reflected() const { return {-a0, a1, T, -xT}; }
};

/// Open interval (d1, d2).
struct Domain {
    double d1 = 0.0;
    double d2 = 1.0;

    void validate() const;
    bool contains(double x) const { return d1 < x && x < d2; }
    double width() const { return d2 - d1; }
    Domain reflected() const { return {-d2, -d1}; }
};

struct SpaceTimePoint {
    double x = 0.0;
    double s = 0.0;
};

struct MeanCov {
    double mean_v;
    double mean_t;
    double cov;  // Cov(x_v, x_t)
};

/// Mean of the OU process started at (from) and pinned at (to), evaluated at v.
double pinned_mean(double a0, double a1, SpaceTimePoint from, SpaceTimePoint to, double v);
/// d/dv of pinned_mean.
double pinned_mean_rate(double a0, double a1, SpaceTimePoint from, SpaceTimePoint to, double v);

/// Bridge drift b(x, t), t < T.
double drift(const BridgeSpec& spec, double x, double t);

/// Deterministic bridge flow from `start`, s <= t <= T.
double flow(const BridgeSpec& spec, SpaceTimePoint start, double t);
double flow_velocity(const BridgeSpec& spec, SpaceTimePoint start, double t);

/// Gaussian law of the bridge started at `start`, s <= v <= t <= T.
MeanCov mean_cov(const BridgeSpec& spec, SpaceTimePoint start, double v, double t, double eps);

/// Conditional variance of x(t_to) given x(t_from), per unit eps.
double transition_variance(const BridgeSpec& spec, double t_from, double t_to);

}  // namespace oubridge
