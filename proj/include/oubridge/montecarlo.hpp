#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "oubridge/bridge_model.hpp"
#include "oubridge/classification.hpp"

namespace oubridge {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Philox4x32-10 keyed by (seed, path index); one independent stream per path.
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint64_t path);

    /// uniform in [0, 1)
    double uniform();
    double normal();

private:
    std::array<std::uint32_t, 4> next_block();

    std::uint32_t key_[2];
    std::uint64_t path_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct McConfig {
    double eps = 0.1;
    std::size_t n_paths = 10000;
    std::size_t n_steps = 2000;
    std::uint64_t seed = 0;
    bool crossing_correction = true;
    bool record_paths = false;
    /// 0: OUBRIDGE_THREADS or the hardware count
    unsigned threads = 0;
};

struct PathRecord {
    std::size_t path_id = 0;
    double exit_time = 0.0;
    Boundary exit_side = Boundary::None;
    bool exited = false;
};

struct McEstimate {
    double q_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::size_t n_exited = 0;
    std::uint64_t seed = 0;
    double eps = 0.0;
    bool crossing_correction = true;
    std::optional<double> mean_exit_time;
    std::size_t n_lower = 0;
    std::size_t n_upper = 0;
    std::vector<PathRecord> paths;  // filled when record_paths
};

using SamplePath = std::vector<std::pair<double, double>>;  // (t, x)

/// Exact-transition path on the uniform grid s = t0 < ... < tn = T, ending at xT.
SamplePath sample_path(const BridgeSpec& spec, SpaceTimePoint start, double eps, std::size_t n_steps,
                       PathStream& stream);

/// Inserts the midpoint of every step, drawn from the exact conditional law given both ends.
SamplePath refine_path(const BridgeSpec& spec, const SamplePath& path, double eps, PathStream& stream);

/// First grid exit (closed complement of D), no crossing correction.
std::optional<std::pair<double, Boundary>> grid_exit(const SamplePath& path, const Domain& domain);

double crossing_probability(double x_i, double x_j, double dt, double eps, double d);

/// 95% Wilson score interval.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

McEstimate estimate_exit_probability(const BridgeSpec& spec, const Domain& domain,
                                     SpaceTimePoint start, const McConfig& cfg);

/// As estimate_exit_probability with per-path records; needs at least 100 exits.
McEstimate exit_statistics(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                           McConfig cfg);

/// Worker count used for `requested` (0 = OUBRIDGE_THREADS or hardware).
unsigned resolve_threads(unsigned requested);

}  // namespace oubridge
