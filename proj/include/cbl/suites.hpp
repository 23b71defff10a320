#pragma once

#include "cbl/report.hpp"

namespace cbl {

// Per-module verification suites; each emits one CheckRecord per registered
// check. `run_suites` executes the requested subset in registration order and
// fills the report (deterministic given config + seed).
std::vector<CheckRecord> run_chart_suite(const RunConfig& cfg);
std::vector<CheckRecord> run_flows_suite(const RunConfig& cfg);
std::vector<CheckRecord> run_model_suite(const RunConfig& cfg);
std::vector<CheckRecord> run_cones_suite(const RunConfig& cfg);
std::vector<CheckRecord> run_blender_suite(const RunConfig& cfg, std::vector<SweepRow>* sweep = nullptr);
std::vector<CheckRecord> run_holonomy_suite(const RunConfig& cfg);
std::vector<CheckRecord> run_suspension_suite(const RunConfig& cfg);
std::vector<CheckRecord> run_transitivity_suite(const RunConfig& cfg);
std::vector<CheckRecord> run_embeddings_suite(const RunConfig& cfg);

Report run_suites(const RunConfig& cfg, std::vector<SweepRow>* sweep = nullptr);

}  // namespace cbl
