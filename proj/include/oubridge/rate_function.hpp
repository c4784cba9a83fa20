#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oubridge/bridge_model.hpp"
#include "oubridge/classification.hpp"

namespace oubridge {

struct PointToPointAction {
    double value = 0.0;
    double d = 0.0;
    double t = 0.0;
};

struct Minimizer {
    double d = 0.0;
    double nu = 0.0;
};

enum class Regularity { StronglyRegular, MultipleMinimizers, DegenerateMinimizer };
std::string to_string(Regularity r);

struct ExitSolution {
    double u = 0.0;
    std::optional<double> u1;  // absent on the side not reached when u = 0
    std::optional<double> u2;
    std::vector<Minimizer> minimizers;
    Regularity regular = Regularity::StronglyRegular;
    std::optional<double> du_dx;
    std::optional<double> d2u_dx2;
    /// u = 0 because the deterministic flow leaves D
    bool deterministic = false;
    std::vector<std::string> diagnostics;
};

struct GRoot {
    double t = 0.0;
    int multiplicity = 1;
};

/// Cost of steering from `start` to (d, t).
PointToPointAction action(const BridgeSpec& spec, SpaceTimePoint start, double d, double t);

/// Stationarity function g divided by a1^2, so that it survives a1 = 0.
/// Same zero set and same sign of dg/dt as the unnormalized g.
double g_func(const BridgeSpec& spec, SpaceTimePoint start, double d, double t);
double dg_dt(const BridgeSpec& spec, SpaceTimePoint start, double d, double t);
/// (g(s), g(T)) in the same normalization
std::pair<double, double> g_endpoints(const BridgeSpec& spec, SpaceTimePoint start, double d);

std::vector<GRoot> g_roots(const BridgeSpec& spec, SpaceTimePoint start, double d);

ExitSolution exit_solution(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start);

/// Closed-form derivatives at a given minimizer (d, nu) seen from `start`.
double du_dx_at(const BridgeSpec& spec, SpaceTimePoint start, Minimizer m);
double d2u_dx2_at(const BridgeSpec& spec, SpaceTimePoint start, Minimizer m);

std::pair<double, double> du_derivatives(const BridgeSpec& spec, const Domain& domain,
                                         SpaceTimePoint start);

/// Minimum-action path from start to (d, t_exit) and its Hamilton momentum.
class OptimalPath {
public:
    OptimalPath(const BridgeSpec& spec, SpaceTimePoint start, double d, double t_exit);

    SpaceTimePoint start() const { return start_; }
    double d() const { return d_; }
    double t_exit() const { return t_exit_; }

    double operator()(double v) const;
    double velocity(double v) const;
    /// alpha = path' - b(path, v)
    double momentum(double v) const;
    /// H = b alpha + alpha^2 / 2
    double hamiltonian(double v) const;

private:
    BridgeSpec spec_;
    SpaceTimePoint start_;
    double d_;
    double t_exit_;
};

OptimalPath optimal_path(const BridgeSpec& spec, SpaceTimePoint start, double d, double t);

inline constexpr int kRootScan = 4096;
inline constexpr double kTieTol = 1e-9;
inline constexpr double kDegenerateTol = 1e-8;

}  // namespace oubridge
