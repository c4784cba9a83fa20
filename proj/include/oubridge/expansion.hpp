#pragma once

#include <vector>

#include "oubridge/bridge_model.hpp"
#include "oubridge/rate_function.hpp"

namespace oubridge {

struct ExpansionResult {
    double u = 0.0;
    double w = 0.0;
    std::vector<double> psi;  // psi_1 .. psi_m
    double q_approx = 0.0;
    /// log of the unclamped series; stays finite after q_approx underflows
    double log_q = 0.0;
    bool clamped = false;
    int order = 0;
    bool family_a_shortcut = false;
};

/// Characteristic through a strongly regular start: the optimal exit path.
OptimalPath characteristic(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start);

/// path' - beta(path, t), beta = b - du/dx, with du/dx taken at the path's own minimizer.
double characteristic_residual(const BridgeSpec& spec, const OptimalPath& path, double t);

/// Prefactor exponent w at a strongly regular start. `tol` is the absolute quadrature tolerance.
double w_term(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
              double tol = 1e-12);

/// psi_1..psi_m (m <= 2). Bundle spacing is bundle_rel * (d2 - d1).
std::vector<double> psi_terms(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                              int m, double bundle_rel = 1e-4);

ExpansionResult q_asymptotic(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                             double eps, int m);

inline constexpr int kMaxOrder = 2;

}  // namespace oubridge
