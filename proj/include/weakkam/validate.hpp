#pragma once

// Property suite behind the `validate` subcommand: operator laws, bounds,
// and measure identities checked on the configured model.  Each violation
// names the invariant and carries the measured numbers.

#include <cstdint>
#include <string>
#include <vector>

#include "weakkam/config.hpp"

namespace weakkam {

struct PropertyViolation {
    std::string name;
    std::string detail;
};

std::vector<PropertyViolation> run_property_suite(const ExperimentConfig& config,
                                                  std::uint64_t seed);

}  // namespace weakkam
