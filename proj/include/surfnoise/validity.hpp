// validity.hpp — Quasistatic and Born-Markov adequacy checks for a scenario

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "surfnoise/config.hpp"

namespace surfnoise::cli {

struct ValidityReport {
    bool quasistatic_ok = true;
    bool markov_ok = true;
    // (sqrt|eps_s| d_s + d) w0 / c; 0 for static scenarios
    double retardation_parameter = 0.0;
    double skin_depth = 0.0;            // conductor half-spaces, at w0 > 0
    double height = 0.0;                // representative particle height, m
    double motion_frequency = 0.0;      // characteristic w0, rad/s
    double correlation_time = 0.0;      // max(hbar/kB T, max_n gamma_n/w_n^2), s
    double relaxation_time = 0.0;       // 1/estimated rate; inf when no rate applies
    std::string regime = "slow-particle";  // "slow-particle" | "resonant" | "neither"
    std::vector<std::string> notes;
};

// Computes margins and the regime; reports, never blocks. Thresholds:
// retardation < 0.1, correlation/relaxation < 0.1.
ValidityReport check_validity(const Scenario& scenario);

nlohmann::json to_json(const ValidityReport& report);

} // namespace surfnoise::cli
