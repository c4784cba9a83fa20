#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace oubridge::num {

/// sinh(a*u)/a, continuous through a = 0.
double sinh_over(double a, double u);

/// |a-b| <= rel * max(1, |a|, |b|)
bool near(double a, double b, double rel = 1e-12);

/// Bisection on [lo, hi] with f(lo), f(hi) of opposite sign (or one of them zero).
/// Stops when the bracket is narrower than tol or can no longer shrink.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double flo, double fhi, double tol = 0.0);

/// Minimizer of a unimodal function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-14);

/// Adaptive Simpson; `tol` is absolute.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 48);

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n nodes (cached per n).
const GaussRule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre: `panels` equal panels of `n` nodes each. Signed if b < a.
double gauss_integrate(const std::function<double(double)>& f, double a, double b,
                       std::size_t panels = 4, std::size_t n = 16);

}  // namespace oubridge::num
