#include "oubridge/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "oubridge/errors.hpp"
#include "oubridge/numerics.hpp"

namespace oubridge {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
constexpr std::size_t kBlock = 1024;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

struct Grid {
    std::vector<double> t, A, B, sd;
};

Grid make_grid(const BridgeSpec& spec, SpaceTimePoint start, std::size_t n) {
    Grid g;
    g.t.resize(n + 1);
    const double L = spec.T - start.s;
    for (std::size_t k = 0; k <= n; ++k)
        g.t[k] = (k == n) ? spec.T : start.s + L * static_cast<double>(k) / static_cast<double>(n);
    g.A.resize(n);
    g.B.resize(n);
    g.sd.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t0 = g.t[k], t1 = g.t[k + 1];
        if (k + 1 == n) {
            g.A[k] = 0.0;
            g.B[k] = spec.xT;
            g.sd[k] = 0.0;
            continue;
        }
        g.A[k] = num::sinh_over(spec.a1, spec.T - t1) / num::sinh_over(spec.a1, spec.T - t0);
        g.B[k] = pinned_mean(spec.a0, spec.a1, {0.0, t0}, {spec.xT, spec.T}, t1);
        g.sd[k] = std::sqrt(transition_variance(spec, t0, t1));
    }
    return g;
}

void check_config(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                  const McConfig& cfg) {
    spec.validate();
    domain.validate();
    if (cfg.n_paths == 0) throw ConfigError("n_paths must be positive");
    if (cfg.n_steps < 2) throw ConfigError("n_steps must be at least 2");
    if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw ConfigError("eps must be positive");
    if (!domain.contains(start.x)) throw DomainError("start point must lie inside D");
    if (!(start.s >= 0.0 && start.s < spec.T)) throw DomainError("start time must lie in [0, T)");
}

struct BlockStats {
    std::size_t exited = 0, lower = 0, upper = 0;
    double time_sum = 0.0;
};

}  // namespace

PathStream::PathStream(std::uint64_t seed, std::uint64_t path) : path_(path) {
    key_[0] = static_cast<std::uint32_t>(seed);
    key_[1] = static_cast<std::uint32_t>(seed >> 32);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> key) {
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
        k0 += kW0;
        k1 += kW1;
    }
    return c;
}

std::array<std::uint32_t, 4> PathStream::next_block() {
    const std::array<std::uint32_t, 4> c{static_cast<std::uint32_t>(counter_),
                                         static_cast<std::uint32_t>(counter_ >> 32),
                                         static_cast<std::uint32_t>(path_),
                                         static_cast<std::uint32_t>(path_ >> 32)};
    ++counter_;
    return philox4x32(c, {key_[0], key_[1]});
}

double PathStream::uniform() {
    if (used_ > 2) {
        block_ = next_block();
        used_ = 0;
    }
    const std::uint64_t a = block_[used_] >> 5, b = block_[used_ + 1] >> 6;
    used_ += 2;
    return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) * (1.0 / 9007199254740992.0);
}

double PathStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Marsaglia polar method
    double v1, v2, r2;
    do {
        v1 = 2.0 * uniform() - 1.0;
        v2 = 2.0 * uniform() - 1.0;
        r2 = v1 * v1 + v2 * v2;
    } while (r2 >= 1.0 || r2 == 0.0);
    const double f = std::sqrt(-2.0 * std::log(r2) / r2);
    spare_ = v2 * f;
    has_spare_ = true;
    return v1 * f;
}

SamplePath sample_path(const BridgeSpec& spec, SpaceTimePoint start, double eps, std::size_t n_steps,
                       PathStream& stream) {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    if (n_steps < 1) throw ConfigError("n_steps must be positive");
    const Grid g = make_grid(spec, start, n_steps);
    const double se = std::sqrt(eps);
    SamplePath path;
    path.reserve(n_steps + 1);
    double x = start.x;
    path.emplace_back(g.t[0], x);
    for (std::size_t k = 0; k < n_steps; ++k) {
        x = (k + 1 == n_steps) ? spec.xT : g.A[k] * x + g.B[k] + se * g.sd[k] * stream.normal();
        path.emplace_back(g.t[k + 1], x);
    }
    return path;
}

SamplePath refine_path(const BridgeSpec& spec, const SamplePath& path, double eps, PathStream& stream) {
    SamplePath out;
    if (path.empty()) return out;
    out.reserve(2 * path.size() - 1);
    out.push_back(path.front());
    const double se = std::sqrt(eps);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const auto [t0, x0] = path[i];
        const auto [t1, x1] = path[i + 1];
        const double tm = 0.5 * (t0 + t1);
        const double h = tm - t0;
        const double mean = pinned_mean(spec.a0, spec.a1, {x0, t0}, {x1, t1}, tm);
        const double sh = num::sinh_over(spec.a1, h);
        const double sd = std::sqrt(sh * sh / num::sinh_over(spec.a1, t1 - t0));
        out.emplace_back(tm, mean + se * sd * stream.normal());
        out.push_back(path[i + 1]);
    }
    return out;
}

std::optional<std::pair<double, Boundary>> grid_exit(const SamplePath& path, const Domain& domain) {
    for (const auto& [t, x] : path) {
        if (x <= domain.d1) return std::make_pair(t, Boundary::Lower);
        if (x >= domain.d2) return std::make_pair(t, Boundary::Upper);
    }
    return std::nullopt;
}

double crossing_probability(double x_i, double x_j, double dt, double eps, double d) {
    const double prod = (d - x_i) * (d - x_j);
    if (prod <= 0.0) return 1.0;
    return std::exp(-2.0 * prod / (eps * dt));
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, std::min(p, centre - half)), std::min(1.0, std::max(p, centre + half))};
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OUBRIDGE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

McEstimate estimate_exit_probability(const BridgeSpec& spec, const Domain& domain,
                                     SpaceTimePoint start, const McConfig& cfg) {
    check_config(spec, domain, start, cfg);
    const std::size_t n = cfg.n_steps;
    const Grid g = make_grid(spec, start, n);
    const double se = std::sqrt(cfg.eps);
    const double d1 = domain.d1, d2 = domain.d2;
    const double inv2 = 2.0 / cfg.eps;

    McEstimate est;
    est.n_paths = cfg.n_paths;
    est.n_steps = n;
    est.seed = cfg.seed;
    est.eps = cfg.eps;
    est.crossing_correction = cfg.crossing_correction;
    if (cfg.record_paths) est.paths.resize(cfg.n_paths);

    const std::size_t n_blocks = (cfg.n_paths + kBlock - 1) / kBlock;
    std::vector<BlockStats> blocks(n_blocks);
    std::atomic<std::size_t> next{0};

    auto run_path = [&](std::size_t id, BlockStats& bs) {
        PathStream rs(cfg.seed, id);
        double x = start.x;
        Boundary side = Boundary::None;
        double when = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double xn = (k + 1 == n) ? spec.xT : g.A[k] * x + g.B[k] + se * g.sd[k] * rs.normal();
            if (xn <= d1) {
                side = Boundary::Lower;
                when = g.t[k + 1];
                break;
            }
            if (xn >= d2) {
                side = Boundary::Upper;
                when = g.t[k + 1];
                break;
            }
            if (cfg.crossing_correction) {
                const double dt = g.t[k + 1] - g.t[k];
                const double al = inv2 * (d1 - x) * (d1 - xn) / dt;
                if (al < 50.0 && rs.uniform() < std::exp(-al)) {
                    side = Boundary::Lower;
                    when = g.t[k] + 0.5 * dt;
                    break;
                }
                const double au = inv2 * (d2 - x) * (d2 - xn) / dt;
                if (au < 50.0 && rs.uniform() < std::exp(-au)) {
                    side = Boundary::Upper;
                    when = g.t[k] + 0.5 * dt;
                    break;
                }
            }
            x = xn;
        }
        if (side != Boundary::None) {
            ++bs.exited;
            (side == Boundary::Lower ? bs.lower : bs.upper) += 1;
            bs.time_sum += when;
        }
        if (cfg.record_paths) est.paths[id] = {id, side == Boundary::None ? 0.0 : when, side,
                                               side != Boundary::None};
    };

    auto worker = [&]() {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            BlockStats bs;
            const std::size_t hi = std::min(cfg.n_paths, (b + 1) * kBlock);
            for (std::size_t id = b * kBlock; id < hi; ++id) run_path(id, bs);
            blocks[b] = bs;
        }
    };

    const unsigned workers = std::min<std::size_t>(resolve_threads(cfg.threads), n_blocks);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double time_sum = 0.0;
    for (const BlockStats& bs : blocks) {
        est.n_exited += bs.exited;
        est.n_lower += bs.lower;
        est.n_upper += bs.upper;
        time_sum += bs.time_sum;
    }
    est.q_hat = static_cast<double>(est.n_exited) / static_cast<double>(cfg.n_paths);
    std::tie(est.ci_low, est.ci_high) = wilson_interval(est.n_exited, cfg.n_paths);
    if (est.n_exited > 0) est.mean_exit_time = time_sum / static_cast<double>(est.n_exited);
    return est;
}

McEstimate exit_statistics(const BridgeSpec& spec, const Domain& domain, SpaceTimePoint start,
                           McConfig cfg) {
    cfg.record_paths = true;
    McEstimate est = estimate_exit_probability(spec, domain, start, cfg);
    if (est.n_exited < 100)
        throw InsufficientExits("only " + std::to_string(est.n_exited) +
                                " paths exited; exit statistics need at least 100");
    return est;
}

}  // namespace oubridge
