#pragma once

#include <string>
#include <vector>

#include "cbl/blender.hpp"
#include "cbl/config.hpp"

namespace cbl {

struct CheckRecord {
    std::string suite;
    std::string name;      // check id, unique within the suite
    std::string ref;       // property slug the check verifies
    Verdict verdict = Verdict::Inconclusive;
    double margin = 0;
    std::string witness;
    double runtime_ms = 0;
};

struct Report {
    std::string schema = "cblab-report/1";
    std::string config_echo;
    std::vector<CheckRecord> records;

    int exit_code() const;  // 0 all pass, 1 any fail, 2 inconclusive only
};

// Deterministic JSON (stable key order, %.17g floats); timestamps and host
// details are written to a separate .meta sidecar, never into the report.
std::string report_to_json(const Report& r);
Report report_from_json(const std::string& json_text);
void write_report(const Report& r, const std::string& path, bool with_meta_sidecar = true);

// CSV sweep table: one row per r with the blender margins.
struct SweepRow {
    double r = 0;
    long m_r = 0;
    double axiom_margin[6] = {0, 0, 0, 0, 0, 0};  // a..f
    double distinctive_pass_rate = 0;
};
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

// Registered checks per suite; the all-suite run fails if any is missing.
const std::vector<std::pair<std::string, std::string>>& registered_checks();
std::vector<std::string> missing_checks(const Report& r, const std::vector<std::string>& suites);

}  // namespace cbl
