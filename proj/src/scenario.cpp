#include "oubridge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "oubridge/errors.hpp"

namespace oubridge {

using nlohmann::json;

namespace {

double number(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("scenario is missing key '") + key + "'");
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string("scenario key '") + key + "' must be a number");
    return v.get<double>();
}

template <class T>
T optional_value(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("scenario key '") + key + "' has the wrong type");
    }
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    Scenario sc;
    sc.spec = {number(j, "a0"), number(j, "a1"), number(j, "T"), number(j, "xT")};
    sc.domain = {number(j, "d1"), number(j, "d2")};
    try {
        sc.spec.validate();
        sc.domain.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (j.contains("points")) {
        const json& pts = j.at("points");
        if (!pts.is_array()) throw ConfigError("'points' must be an array of [x, s] pairs");
        for (const json& p : pts) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ConfigError("each point must be a pair [x, s]");
            const SpaceTimePoint q{p[0].get<double>(), p[1].get<double>()};
            if (!sc.domain.contains(q.x) || !(q.s >= 0.0 && q.s < sc.spec.T)) {
                std::ostringstream os;
                os << "point (" << q.x << ", " << q.s << ") lies outside D x [0, T)";
                throw ConfigError(os.str());
            }
            sc.points.push_back(q);
        }
    }
    if (j.contains("eps")) {
        const json& es = j.at("eps");
        if (!es.is_array()) throw ConfigError("'eps' must be an array");
        for (const json& e : es) {
            if (!e.is_number() || !(e.get<double>() > 0.0))
                throw ConfigError("every eps must be a positive number");
            sc.eps.push_back(e.get<double>());
        }
        std::sort(sc.eps.begin(), sc.eps.end(), std::greater<>());
    }
    sc.order = optional_value<int>(j, "order", 0);
    if (sc.order < 0) throw ConfigError("'order' must be nonnegative");
    sc.exit_statistics = optional_value<bool>(j, "exit_statistics", false);
    if (j.contains("mc")) {
        const json& m = j.at("mc");
        if (!m.is_object()) throw ConfigError("'mc' must be an object");
        sc.has_mc = true;
        sc.mc.n_paths = optional_value<std::size_t>(m, "n_paths", sc.mc.n_paths);
        sc.mc.n_steps = optional_value<std::size_t>(m, "n_steps", sc.mc.n_steps);
        sc.mc.seed = optional_value<std::uint64_t>(m, "seed", sc.mc.seed);
        sc.mc.crossing_correction = optional_value<bool>(m, "crossing_correction", true);
        if (sc.mc.n_paths == 0) throw ConfigError("mc.n_paths must be positive");
        if (sc.mc.n_steps < 2) throw ConfigError("mc.n_steps must be at least 2");
    }
    if (j.contains("field")) {
        const json& f = j.at("field");
        sc.field.nx = optional_value<int>(f, "nx", sc.field.nx);
        sc.field.nt = optional_value<int>(f, "nt", sc.field.nt);
        sc.field.samples = optional_value<int>(f, "samples", sc.field.samples);
        if (sc.field.nx < 2 || sc.field.nt < 1 || sc.field.samples < 2)
            throw ConfigError("field grid needs nx >= 2, nt >= 1, samples >= 2");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed scenario JSON: ") + e.what());
    }
    return parse_scenario(j);
}

json to_json(const Scenario& sc) {
    json j;
    j["a0"] = sc.spec.a0;
    j["a1"] = sc.spec.a1;
    j["T"] = sc.spec.T;
    j["xT"] = sc.spec.xT;
    j["d1"] = sc.domain.d1;
    j["d2"] = sc.domain.d2;
    j["points"] = json::array();
    for (const auto& p : sc.points) j["points"].push_back({p.x, p.s});
    j["eps"] = sc.eps;
    j["order"] = sc.order;
    if (sc.has_mc)
        j["mc"] = {{"n_paths", sc.mc.n_paths},
                   {"n_steps", sc.mc.n_steps},
                   {"seed", sc.mc.seed},
                   {"crossing_correction", sc.mc.crossing_correction}};
    j["exit_statistics"] = sc.exit_statistics;
    j["field"] = {{"nx", sc.field.nx}, {"nt", sc.field.nt}, {"samples", sc.field.samples}};
    return j;
}

json to_json(const ExitSolution& sol) {
    json j;
    j["u"] = sol.u;
    j["u1"] = opt(sol.u1);
    j["u2"] = opt(sol.u2);
    j["minimizers"] = json::array();
    for (const auto& m : sol.minimizers) j["minimizers"].push_back({{"d", m.d}, {"nu", m.nu}});
    j["regularity"] = to_string(sol.regular);
    j["du_dx"] = opt(sol.du_dx);
    j["d2u_dx2"] = opt(sol.d2u_dx2);
    return j;
}

json to_json(const ExpansionResult& r) {
    return {{"u", r.u},         {"w", r.w},
            {"psi", r.psi},     {"q_approx", r.q_approx},
            {"log_q", r.log_q},
            {"clamped", r.clamped}, {"order", r.order},
            {"family_a_shortcut", r.family_a_shortcut}};
}

json to_json(const McEstimate& e) {
    json j{{"q_hat", e.q_hat},
           {"ci_low", e.ci_low},
           {"ci_high", e.ci_high},
           {"n_paths", e.n_paths},
           {"n_steps", e.n_steps},
           {"seed", e.seed},
           {"eps", e.eps},
           {"crossing_correction", e.crossing_correction},
           {"n_exited", e.n_exited},
           {"n_lower", e.n_lower},
           {"n_upper", e.n_upper}};
    j["mean_exit_time"] = opt(e.mean_exit_time);
    return j;
}

}  // namespace oubridge
