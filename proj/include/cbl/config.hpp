#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cbl/chart.hpp"
#include "cbl/model.hpp"

namespace cbl {

// Run configuration: flat key-value tables per module, parsed from an
// INI-style document ("[section]" headers, "key = value" lines, '#' comments).
struct RunConfig {
    ChartParams chart;
    ModelParams model;
    std::vector<double> r_values{0.1, 0.05, 0.02};
    std::vector<std::string> suites{"chart",   "flows",    "model",        "cones",
                                    "blender", "holonomy", "suspension",   "transitivity",
                                    "embeddings"};
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    double cone_eps = 0.25;
    int grid_cells = 32;

    // Validates all referenced parameters against module invariants; throws
    // std::invalid_argument naming the offending field ("chart.L", ...).
    void validate() const;

    // Canonical serialization (stable ordering) used for the report echo.
    std::string canonical_text() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace cbl
