#pragma once

// Scenario configuration and execution: every CLI subcommand maps to one
// Scenario value, runs through run_scenario, and produces a column-documented
// CSV plus a JSON summary embedding the fully resolved Scenario. Identical
// Scenario values produce byte-identical outputs (fixed iteration orders,
// deterministic numerics, worker-count-independent aggregation).

#include <string>
#include <vector>

#include "thinspec/io.hpp"
#include "thinspec/model.hpp"

namespace thinspec {

struct Scenario {
    // static | kz | exact | ed | figure1 | figure2 | figure3 | figure4 |
    // sweep | check
    std::string kind = "kz";
    ModelParams params{1.0, 1.0, 1e-2, 100, 1.0};

    double t_end_over_that = 9.0;  // horizon, in freeze-out-time units
    int samples = 400;             // output-grid size
    int k_max = 5;                 // recursion/comb depth
    int n_max = 0;                 // snapshot-expansion order (0 = auto)

    // kind == "static": geometric field grid
    double H_min = 1e-3;
    double H_max = 1.0;

    // figure2/figure3: one curve per start time (in t_hat units)
    std::vector<double> t0_over_that_list;

    // kind == "sweep"
    std::string sweep_axis = "t0_over_that";  // t0_over_that | N | delta
    std::string sweep_kind = "kz";            // kz | exact
    std::vector<double> axis_values;
    int workers = 0;  // 0: THINSPEC_WORKERS env var, else 1

    // kind == "ed"
    double ed_dt = 0.0;  // 0 = auto

    // kind == "check"
    std::string check_name;  // exact-vs-grid | kz-vs-exact | ed-vs-continuum |
                             // wigner-eckart-vs-clebsch-gordan
    double tol = 0.0;        // 0 = per-check default

    void validate() const;  // throws std::domain_error on bad configs
};

void to_json(ordered_json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

struct RunOutput {
    ordered_json summary;
    std::vector<std::string> files_written;
    bool passed = true;  // only meaningful for kind == "check"
};

// Dispatches on s.kind (including sweep and check). Writes outputs under
// out_dir (created if missing) and returns the summary. Throws
// std::domain_error for invalid configurations and NumericalError for
// numerical failures.
RunOutput run_scenario(const Scenario& s, const std::string& out_dir);

}  // namespace thinspec
