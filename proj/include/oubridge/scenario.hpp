#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oubridge/bridge_model.hpp"
#include "oubridge/classification.hpp"
#include "oubridge/expansion.hpp"
#include "oubridge/montecarlo.hpp"
#include "oubridge/rate_function.hpp"

namespace oubridge {

struct FieldOptions {
    int nx = 50;
    int nt = 50;
    int samples = 101;  // points per polyline
};

/// Batch input read by the command-line front end.
struct Scenario {
    BridgeSpec spec;
    Domain domain;
    std::vector<SpaceTimePoint> points;
    std::vector<double> eps;  // sorted descending
    int order = 0;
    McConfig mc;
    bool has_mc = false;
    bool exit_statistics = false;
    FieldOptions field;
};

/// Throws ConfigError on malformed or inconsistent input.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& sc);

nlohmann::json to_json(const ExitSolution& sol);
nlohmann::json to_json(const ExpansionResult& r);
nlohmann::json to_json(const McEstimate& e);

/// 17 significant digits
std::string fmt(double v);

}  // namespace oubridge
