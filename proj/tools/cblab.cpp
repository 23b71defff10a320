// cblab: run the verification suites of the contact-blender laboratory and
// emit machine-readable reports.
//
//   cblab verify <suite>|all [--config PATH] [--r LIST] [--seed N]
//                            [--out DIR] [--json] [--csv]
//
// Exit status: 0 if every check passes, 1 if any fails, 2 if any is
// inconclusive and none fails.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cbl/suites.hpp"

namespace {

std::vector<double> parse_r_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cblab - numerical laboratory for a contact blender and its "
                 "characteristic-foliation pipeline"};
    app.require_subcommand(1);

    std::string suite, config_path, r_list, out_dir;
    std::uint64_t seed = 0;
    bool want_json = false, want_csv = false, have_seed = false;

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite,
                       "chart|flows|model|cones|blender|holonomy|suspension|"
                       "transitivity|embeddings|all")
        ->required();
    verify->add_option("--config", config_path, "configuration file (key = value sections)");
    verify->add_option("--r", r_list, "comma-separated r values");
    auto* seed_opt = verify->add_option("--seed", seed, "random seed");
    verify->add_option("--out", out_dir, "output directory for report files");
    verify->add_flag("--json", want_json, "write report.json (+ .meta sidecar)");
    verify->add_flag("--csv", want_csv, "write sweep.csv (blender margins per r)");

    CLI11_PARSE(app, argc, argv);
    have_seed = seed_opt->count() > 0;

    cbl::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = cbl::load_config_file(config_path);
        if (!r_list.empty()) cfg.r_values = parse_r_list(r_list);
        if (have_seed) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (suite != "all") cfg.suites = {suite};
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    }

    std::vector<cbl::SweepRow> sweep;
    cbl::Report rep;
    try {
        rep = cbl::run_suites(cfg, &sweep);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 70;
    }

    for (const auto& rec : rep.records)
        std::cout << "[" << cbl::to_string(rec.verdict) << "] " << rec.suite << "/" << rec.name
                  << "  margin=" << rec.margin << "  " << rec.witness << "\n";

    if (suite == "all") {
        auto missing = cbl::missing_checks(rep, cfg.suites);
        if (!missing.empty()) {
            for (const auto& m : missing) std::cerr << "missing registered check: " << m << "\n";
            return 1;
        }
    }

    std::filesystem::create_directories(cfg.out_dir);
    if (want_json) cbl::write_report(rep, cfg.out_dir + "/report.json");
    if (want_csv) {
        std::ofstream csv(cfg.out_dir + "/sweep.csv", std::ios::binary);
        csv << cbl::sweep_to_csv(sweep);
    }

    int code = rep.exit_code();
    std::cout << "verdict summary: exit " << code << "\n";
    return code;
}
