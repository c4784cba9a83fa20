#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "oubridge/bridge_model.hpp"

namespace oubridge {

enum class Family { A, B };

/// Regime label. roman is 1..7; sub is 0 when the case has no subcases.
/// A Brownian bridge (a1 = 0) has no regime table: brownian is set and roman is 0.
struct CaseLabel {
    Family family = Family::A;
    int roman = 0;
    int sub = 0;
    bool mirrored = false;
    bool brownian = false;

    bool is(Family f, int r, int s = 0) const {
        return !brownian && family == f && roman == r && sub == s;
    }
    /// e.g. "A_VII_III(mirrored=false)"; "BrownianBridge(family=B)" for a1 = 0
    std::string to_string() const;
};

enum class MonotoneKind { Increasing, Decreasing, Constant, DownUp, UpDown };

struct Monotonicity {
    MonotoneKind kind = MonotoneKind::Constant;
    std::optional<double> turning_time;
};

enum class Region {
    Sigma1, Sigma2, Sigma3,
    Lambda1, Lambda2, Lambda3,
    Theta1, Theta2, Theta3,
    Whole,
};

enum class Boundary { None, Lower, Upper };

struct DeterministicExit {
    double tau0 = std::numeric_limits<double>::infinity();
    Boundary boundary = Boundary::None;
    bool tangential = false;

    bool exits() const { return boundary != Boundary::None; }
};

/// Critical trajectory through the tangency point (A_VII_III: t2, B_I_II: t4).
struct CriticalTrajectory {
    double t_crit = 0.0;
    std::optional<double> t3;  // A_VII_III only
    std::function<double(double)> curve;
};

std::string to_string(MonotoneKind k);
std::string to_string(Region r);
std::string to_string(Boundary b);

Monotonicity monotonicity(const BridgeSpec& spec, SpaceTimePoint start);

bool omega_contains(const BridgeSpec& spec, SpaceTimePoint point);

CaseLabel classify(const BridgeSpec& spec, const Domain& domain);

CriticalTrajectory critical_trajectory(const BridgeSpec& spec, const Domain& domain,
                                       const CaseLabel& label);

Region region_tag(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint point);

DeterministicExit deterministic_exit(const BridgeSpec& spec, const Domain& domain,
                                     SpaceTimePoint start);

/// Pitchfork time: the s at which the d1-side stationarity roots for x = xT merge
/// (canonical orientation; the original d2 side when mirrored). Family B only.
std::optional<double> tau_star(const BridgeSpec& spec, const Domain& domain);

/// Canonical orientation used by the regime tables.
struct Canonical {
    BridgeSpec spec;
    Domain domain;
    bool mirrored = false;
    double map(double x) const { return mirrored ? -x : x; }
};
Canonical canonicalize(const BridgeSpec& spec, const Domain& domain);

inline constexpr double kPartitionTol = 1e-10;

}  // namespace oubridge
