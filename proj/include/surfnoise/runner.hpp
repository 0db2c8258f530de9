// runner.hpp — Computation dispatch and deterministic CSV/manifest output

#pragma once

#include <string>
#include <vector>

#include "surfnoise/config.hpp"
#include "surfnoise/validity.hpp"

namespace surfnoise::cli {

struct RunOptions {
    std::string out_dir = ".";
    int threads = 1;
    bool check_only = false;  // report validity, skip the computation
};

struct RunResult {
    std::vector<std::string> files;  // paths written, manifest last
    ValidityReport validity;
};

// Executes the scenario's computation, writes its CSV outputs and the run
// manifest (manifest.json) under out_dir. Throws surfnoise::Error on failure.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

// Scientific notation with 12 significant digits ('.' decimal separator).
std::string format_sci(double value);

} // namespace surfnoise::cli
