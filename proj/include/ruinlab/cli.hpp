// Experiment layer behind the command line tool: configuration parsing,
// running the estimator battery over a horizon grid, and CSV output.
// Kept in the library so tests can drive the exact code the binary runs.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ruinlab/model.hpp"
#include "ruinlab/simulate.hpp"
#include "ruinlab/switching.hpp"

namespace ruinlab::cli {

// Everything one experiment needs. `horizons` lists the grid to sweep; when
// empty the query horizon alone is used. `methods` selects estimators by
// name: "mc", "diffusion", "single-switch", "independence".
struct ExperimentConfig {
    model::RiskModel model;
    model::RuinQuery query;
    simulate::McConfig mc;
    switching::QuadratureConfig quadrature;
    std::vector<double> horizons;
    std::vector<std::string> methods;
    std::string output;  // CSV file path; empty writes to stdout
};

// Raised on malformed configuration input. `code` is stable and machine
// readable (e.g. "missing-key", "bad-value", "row-sum").
struct ConfigError {
    std::string code;
    std::string message;
};

// Parses the INI experiment format (see configs/ for annotated examples).
// Throws ConfigError on the first syntactic or semantic violation,
// including everything model::validate reports.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

// One row of experiment output: the estimates at one horizon. Methods that
// were not requested stay disengaged and print as empty CSV cells.
struct ResultRow {
    double horizon = 0.0;
    std::optional<double> mc;
    std::optional<double> mc_ci_low;
    std::optional<double> mc_ci_high;
    std::optional<double> diffusion;
    std::optional<double> single_switch;
    std::optional<double> independence;
    int state = 0;       // initial environment state, 1-based; 0 = stationary
    std::string mode;    // query mode in config syntax ("all", "marginal:2", ...)
};

// Raised when an estimator fails at some grid point; names both so the CLI
// can report "method X failed at T=Y" and exit with the estimator status.
struct EstimatorError {
    std::string method;
    double horizon = 0.0;
    std::string message;
};

// Runs every requested method at every horizon. Monte Carlo runs once at
// the largest horizon and serves the whole grid from the recorded ruin
// times; the analytic methods run per horizon.
std::vector<ResultRow> run(const ExperimentConfig& config);

// Writes rows as CSV with the fixed column set
//   T,mc,mc_ci_low,mc_ci_high,diffusion,single_switch,independence,state,mode
// using byte-stable formatting (17 significant digits, no locale).
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);

// The bundled example configurations, embedded so the reproduction
// subcommand works from any directory. Index 1..3; equal byte-for-byte to
// the files under configs/ (a test enforces it).
const std::string& builtin_example_config(int index);

// Full command line entry (subcommands: estimate, approx-diffusion,
// approx-switch, compare, reproduce, fclt-check). Returns the process exit
// status: 0 success, 2 configuration/parse failure, 3 estimator failure.
int main_entry(int argc, char** argv);

}  // namespace ruinlab::cli
