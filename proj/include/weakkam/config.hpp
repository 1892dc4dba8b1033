#pragma once

// Flat, line-oriented experiment configuration:
//
//   # comment
//   section.key = value
//   solver.delta_schedule = [0.4, 0.2, 0.1]
//   model.potential = [[0, 0.025, 0], [1, -0.025, 0]]
//
// Scalars, strings, and (nested) bracketed lists of numbers are the only
// value forms.  parse -> serialize -> parse is the identity on all
// semantic fields.

#include <string>
#include <vector>

#include "weakkam/models.hpp"

namespace weakkam {

struct ExperimentConfig {
    // model block
    int dimension = 1;
    std::string model_kind = "quadratic-kinetic-plus-potential";
    double mass = 1.0;
    std::vector<PotentialTerm> potential;

    // action block
    double tau = 0.1;
    std::vector<double> tau_schedule;  // overrides tau for sweep subcommands
    std::vector<double> p;             // defaults to zero
    double safety = 1.5;               // window inflation factor

    // grid block: explicit n, or the rule h <= c_h * tau^2
    int n = 0;  // 0 means "use the rule"
    double c_h = 1.0;

    // solver block
    std::vector<double> delta_schedule;  // defaults to 0.4 * 2^-k, 8 entries
    double tol = 1e-8;            // fixed-point certification tolerance
    double selection_tol = 0.01;  // Cauchy tolerance for the delta -> 0 limit
    long max_iter = 5'000'000;

    // sweep-delta coupling tau = coupling * delta^2
    double sweep_coupling = 1.0;

    // output block
    std::string output_directory = "out";
    int precision = 17;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

// Throws ConfigError naming the violated invariant.
void validate_config(const ExperimentConfig& config);

LagrangianModel make_model(const ExperimentConfig& config);
DiscreteAction make_action(const ExperimentConfig& config, double tau);

// Grid size for a given tau: the explicit n, or ceil(1/(c_h tau^2)).
int grid_nodes_for(const ExperimentConfig& config, double tau);

// The tau entries a subcommand should run over (schedule, or the single tau).
std::vector<double> tau_entries(const ExperimentConfig& config);

}  // namespace weakkam
