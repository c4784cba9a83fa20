#include "oubridge/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "oubridge/errors.hpp"
#include "oubridge/numerics.hpp"
#include "oubridge/scenario.hpp"

namespace oubridge {

using nlohmann::json;

namespace {

struct Options {
    std::string command;
    std::string scenario;
    std::string out;
    std::string paths_out;
    std::optional<std::uint64_t> seed;
    bool no_meta = false;
};

bool num_near_fixed(const BridgeSpec& spec) {
    return spec.brownian() || num::near(spec.xT, spec.fixed_point());
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string cell(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string csv_text(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ';';
    return s;
}

void meta_line(std::ostream& os, const Options& opt) {
    if (!opt.no_meta) os << "# oubridge " << opt.command << " generated " << timestamp() << "\n";
}

json meta_json(const Options& opt) {
    return {{"tool", "oubridge"}, {"command", opt.command}, {"generated", timestamp()}};
}

McConfig mc_config(const Scenario& sc, const Options& opt, double eps) {
    McConfig c = sc.mc;
    c.eps = eps;
    if (opt.seed) c.seed = *opt.seed;
    return c;
}

void cmd_classify(const Scenario& sc, const Options& opt, std::ostream& os) {
    const CaseLabel label = classify(sc.spec, sc.domain);
    json j;
    if (!opt.no_meta) j["meta"] = meta_json(opt);
    j["case_label"] = label.to_string();
    j["family"] = label.family == Family::A ? "A" : "B";
    j["brownian"] = label.brownian;
    j["mirrored"] = label.mirrored;
    j["omega_empty"] = num_near_fixed(sc.spec);
    json crit = json::object();
    if (label.is(Family::A, 7, 3) || label.is(Family::B, 1, 2)) {
        const CriticalTrajectory ct = critical_trajectory(sc.spec, sc.domain, label);
        if (label.family == Family::A) {
            crit["t2"] = ct.t_crit;
            crit["t3"] = *ct.t3;
        } else {
            crit["t4"] = ct.t_crit;
        }
    }
    if (label.family == Family::B) {
        const auto ts = tau_star(sc.spec, sc.domain);
        crit["tau_star"] = ts ? json(*ts) : json(nullptr);
        crit["tau_star_in_window"] = ts && *ts >= 0.0 && *ts < sc.spec.T;
    }
    j["critical_times"] = crit;
    j["points"] = json::array();
    for (const auto& p : sc.points) {
        const Monotonicity m = monotonicity(sc.spec, p);
        const DeterministicExit de = deterministic_exit(sc.spec, sc.domain, p);
        json row{{"x", p.x},
                 {"s", p.s},
                 {"omega", omega_contains(sc.spec, p)},
                 {"region", to_string(region_tag(sc.spec, sc.domain, p))},
                 {"monotonicity", to_string(m.kind)}};
        row["turning_time"] = m.turning_time ? json(*m.turning_time) : json(nullptr);
        row["tau0"] = de.exits() ? json(de.tau0) : json(nullptr);
        row["exit_boundary"] = to_string(de.boundary);
        row["tangential"] = de.tangential;
        j["points"].push_back(row);
    }
    os << j.dump(2) << "\n";
}

void cmd_rate(const Scenario& sc, const Options& opt, std::ostream& os) {
    classify(sc.spec, sc.domain);
    meta_line(os, opt);
    os << "x,s,u,u1,u2,d_star,nu_star,regularity,du_dx,d2u_dx2,n_minimizers,minimizers\n";
    for (const auto& p : sc.points) {
        const ExitSolution sol = exit_solution(sc.spec, sc.domain, p);
        std::string all;
        for (const auto& m : sol.minimizers) {
            if (!all.empty()) all += "|";
            all += fmt(m.d) + "@" + fmt(m.nu);
        }
        os << fmt(p.x) << "," << fmt(p.s) << "," << fmt(sol.u) << "," << cell(sol.u1) << ","
           << cell(sol.u2) << "," << fmt(sol.minimizers.front().d) << ","
           << fmt(sol.minimizers.front().nu) << "," << to_string(sol.regular) << ","
           << cell(sol.du_dx) << "," << cell(sol.d2u_dx2) << "," << sol.minimizers.size() << ","
           << all << "\n";
    }
}

void cmd_compare(const Scenario& sc, const Options& opt, std::ostream& os) {
    const CaseLabel label = classify(sc.spec, sc.domain);
    if (sc.order > kMaxOrder) throw UnsupportedOrder("supported series order is 0..2");
    meta_line(os, opt);
    os << "x,s,eps,q_mc,ci_low,ci_high,q_asym,u,w,psi1,minus_eps_ln_qmc,case_label,regularity,"
          "n_lower,n_upper,mean_exit_time,reason\n";
    for (const auto& p : sc.points) {
        const ExitSolution sol = exit_solution(sc.spec, sc.domain, p);
        for (double eps : sc.eps) {
            const McConfig cfg = mc_config(sc, opt, eps);
            const McEstimate est = sc.exit_statistics ? exit_statistics(sc.spec, sc.domain, p, cfg)
                                                      : estimate_exit_probability(sc.spec, sc.domain, p, cfg);
            std::optional<double> q_asym, w, psi1;
            std::string reason;
            try {
                const ExpansionResult r = q_asymptotic(sc.spec, sc.domain, p, eps, sc.order);
                q_asym = r.q_approx;
                w = r.w;
                if (!r.psi.empty()) psi1 = r.psi.front();
                if (r.family_a_shortcut) reason = "shortcut q=1";
                if (r.clamped) reason = "clamped to [0,1]";
            } catch (const SeriesInvalidHere& e) {
                reason = e.what();
            } catch (const NotStronglyRegular& e) {
                reason = e.what();
            }
            std::optional<double> mel;
            if (est.q_hat > 0.0) mel = 0.0 - eps * std::log(est.q_hat);
            os << fmt(p.x) << "," << fmt(p.s) << "," << fmt(eps) << "," << fmt(est.q_hat) << ","
               << fmt(est.ci_low) << "," << fmt(est.ci_high) << "," << cell(q_asym) << ","
               << fmt(sol.u) << "," << cell(w) << "," << cell(psi1) << "," << cell(mel) << ","
               << label.to_string() << "," << to_string(sol.regular) << "," << est.n_lower << ","
               << est.n_upper << "," << cell(est.mean_exit_time) << "," << csv_text(reason) << "\n";
        }
    }
}

void cmd_field(const Scenario& sc, const Options& opt, std::ostream& os) {
    const CaseLabel label = classify(sc.spec, sc.domain);
    const BridgeSpec& spec = sc.spec;
    const Domain& dom = sc.domain;
    meta_line(os, opt);
    os << "kind,id,x,t,b\n";
    for (int j = 0; j < sc.field.nt; ++j) {
        const double t = spec.T * j / sc.field.nt;
        for (int i = 0; i < sc.field.nx; ++i) {
            const double x = dom.d1 + dom.width() * i / (sc.field.nx - 1);
            os << "grid,0," << fmt(x) << "," << fmt(t) << "," << fmt(drift(spec, x, t)) << "\n";
        }
    }
    const int n = sc.field.samples;
    auto polyline = [&](const char* kind, int id, double t0, const std::function<double(double)>& f) {
        for (int k = 0; k < n; ++k) {
            const double t = (k == n - 1) ? spec.T : t0 + (spec.T - t0) * k / (n - 1);
            const double x = f(t);
            os << kind << "," << id << "," << fmt(x) << "," << fmt(t) << ","
               << (t < spec.T ? fmt(drift(spec, x, t)) : std::string()) << "\n";
        }
    };
    for (std::size_t i = 0; i < sc.points.size(); ++i) {
        const SpaceTimePoint p = sc.points[i];
        polyline("flow", static_cast<int>(i), p.s, [&](double t) { return flow(spec, p, t); });
    }
    if (label.is(Family::A, 7, 3) || label.is(Family::B, 1, 2)) {
        const CriticalTrajectory ct = critical_trajectory(spec, dom, label);
        polyline("critical", 0, 0.0, ct.curve);
    }
    if (!num_near_fixed(spec)) {
        const double p = spec.fixed_point();
        const double yT = spec.xT - p;
        auto sep = [&](const char* kind, bool lower) {
            for (int k = 0; k < n - 1; ++k) {
                const double t = spec.T * k / (n - 1);
                const double c = std::cosh(spec.a1 * (spec.T - t));
                const double x = p + (lower ? yT / c : yT * c);
                os << kind << ",0," << fmt(x) << "," << fmt(t) << "," << fmt(drift(spec, x, t)) << "\n";
            }
        };
        sep("cur_I", true);
        sep("cur_II", false);
    }
}

void cmd_simulate(const Scenario& sc, const Options& opt, std::ostream& os) {
    classify(sc.spec, sc.domain);
    json j;
    if (!opt.no_meta) j["meta"] = meta_json(opt);
    j["estimates"] = json::array();
    std::ofstream paths;
    if (!opt.paths_out.empty()) {
        paths.open(opt.paths_out);
        if (!paths) throw ConfigError("cannot open '" + opt.paths_out + "' for writing");
        paths << "path_id,exit_time,exit_side,exited\n";
    }
    for (const auto& p : sc.points) {
        for (double eps : sc.eps) {
            McConfig cfg = mc_config(sc, opt, eps);
            cfg.record_paths = paths.is_open();
            const McEstimate est = estimate_exit_probability(sc.spec, sc.domain, p, cfg);
            json row = to_json(est);
            row["x"] = p.x;
            row["s"] = p.s;
            j["estimates"].push_back(row);
            if (paths.is_open()) {
                paths << "# x=" << fmt(p.x) << " s=" << fmt(p.s) << " eps=" << fmt(eps) << "\n";
                for (const PathRecord& r : est.paths)
                    paths << r.path_id << "," << (r.exited ? fmt(r.exit_time) : std::string()) << ","
                          << to_string(r.exit_side) << "," << (r.exited ? 1 : 0) << "\n";
            }
        }
    }
    os << j.dump(2) << "\n";
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config:
        case ErrorKind::Domain:
            return kExitParse;
        case ErrorKind::UnsupportedBoundaryPin:
        case ErrorKind::UnsupportedOrder:
        case ErrorKind::NotApplicable:
            return kExitUnsupported;
        default:
            return kExitNumerical;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Exit probabilities of Ornstein-Uhlenbeck bridges", "oubridge"};
    app.add_option("command", opt.command, "classify | rate | compare | field | simulate")
        ->required()
        ->check(CLI::IsMember({"classify", "rate", "compare", "field", "simulate"}));
    app.add_option("--scenario", opt.scenario, "scenario JSON file")->required();
    app.add_option("--out", opt.out, "write output to FILE instead of stdout");
    app.add_option("--paths-out", opt.paths_out, "per-path CSV dump (simulate)");
    app.add_option("--seed", opt.seed, "override mc.seed");
    app.add_flag("--no-header-meta", opt.no_meta, "omit the timestamp header");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "oubridge: " << e.what() << "\n";
        return kExitParse;
    }

    try {
        const Scenario sc = load_scenario(opt.scenario);
        std::ostringstream buf;
        if (opt.command == "classify") cmd_classify(sc, opt, buf);
        else if (opt.command == "rate") cmd_rate(sc, opt, buf);
        else if (opt.command == "compare") cmd_compare(sc, opt, buf);
        else if (opt.command == "field") cmd_field(sc, opt, buf);
        else cmd_simulate(sc, opt, buf);
        if (opt.out.empty()) {
            out << buf.str();
        } else {
            std::ofstream f(opt.out);
            if (!f) throw ConfigError("cannot open '" + opt.out + "' for writing");
            f << buf.str();
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "oubridge: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        err << "oubridge: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        err << "oubridge: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace oubridge
