#include "cbl/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cbl {

using ordered_json = nlohmann::ordered_json;

int Report::exit_code() const {
    bool any_fail = false, any_inconclusive = false;
    for (const auto& rec : records) {
        if (rec.verdict == Verdict::Fail) any_fail = true;
        if (rec.verdict == Verdict::Inconclusive) any_inconclusive = true;
    }
    if (any_fail) return 1;
    if (any_inconclusive) return 2;
    return 0;
}

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string report_to_json(const Report& r) {
    ordered_json j;
    j["schema"] = r.schema;
    j["config"] = r.config_echo;
    ordered_json recs = ordered_json::array();
    for (const auto& rec : r.records) {
        ordered_json o;
        o["suite"] = rec.suite;
        o["name"] = rec.name;
        o["ref"] = rec.ref;
        o["verdict"] = to_string(rec.verdict);
        // Numbers are serialized as fixed strings so the byte stream is
        // independent of the JSON library's float formatting.
        o["margin"] = fmt_double(rec.margin);
        o["witness"] = rec.witness;
        recs.push_back(o);
    }
    j["records"] = recs;
    return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    Report r;
    r.schema = j.at("schema").get<std::string>();
    r.config_echo = j.at("config").get<std::string>();
    for (const auto& o : j.at("records")) {
        CheckRecord rec;
        rec.suite = o.at("suite").get<std::string>();
        rec.name = o.at("name").get<std::string>();
        rec.ref = o.at("ref").get<std::string>();
        std::string v = o.at("verdict").get<std::string>();
        rec.verdict = v == "pass" ? Verdict::Pass : (v == "fail" ? Verdict::Fail : Verdict::Inconclusive);
        rec.margin = std::stod(o.at("margin").get<std::string>());
        rec.witness = o.at("witness").get<std::string>();
        r.records.push_back(rec);
    }
    return r;
}

void write_report(const Report& r, const std::string& path, bool with_meta_sidecar) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_report: cannot open " + path);
    out << report_to_json(r);
    out.close();
    if (with_meta_sidecar) {
        std::ofstream meta(path + ".meta", std::ios::binary);
        auto now = std::chrono::system_clock::now().time_since_epoch();
        meta << "generated_unix_ms = "
             << std::chrono::duration_cast<std::chrono::milliseconds>(now).count() << "\n";
        double total = 0;
        for (const auto& rec : r.records) total += rec.runtime_ms;
        meta << "total_runtime_ms = " << fmt_double(total) << "\n";
    }
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string csv =
        "r,m_r,axiom_a_margin,axiom_b_margin,axiom_c_margin,axiom_d_margin,axiom_e_margin,"
        "axiom_f_margin,distinctive_pass_rate\n";
    for (const auto& row : rows) {
        csv += fmt_double(row.r) + "," + std::to_string(row.m_r);
        for (double m : row.axiom_margin) csv += "," + fmt_double(m);
        csv += "," + fmt_double(row.distinctive_pass_rate) + "\n";
    }
    return csv;
}

const std::vector<std::pair<std::string, std::string>>& registered_checks() {
    static const std::vector<std::pair<std::string, std::string>> reg{
        {"chart", "reeb-pairing"},
        {"chart", "alpha-linearity"},
        {"chart", "contact-volume"},
        {"chart", "strict-pullback-builtins"},
        {"chart", "hamiltonian-solver"},
        {"flows", "profile-shape"},
        {"flows", "closed-vs-rk4-end-ranges"},
        {"flows", "step-halving-middle"},
        {"flows", "flow-property"},
        {"flows", "monotone-psi"},
        {"flows", "kernel-preservation"},
        {"flows", "generator-consistency"},
        {"model", "strict-factors"},
        {"model", "psi-kernel-alpha"},
        {"model", "projection-commutation"},
        {"model", "coordinate-contraction-u"},
        {"model", "coordinate-contraction-s-full"},
        {"model", "coordinate-contraction-s-low"},
        {"model", "fixed-points"},
        {"model", "heteroclinic-points"},
        {"model", "center-part-1"},
        {"model", "center-part-2-nu"},
        {"model", "center-part-2-error"},
        {"model", "invariant-manifolds"},
        {"cones", "membership"},
        {"cones", "diagonal-contraction-oracle"},
        {"cones", "diagonal-dilation-oracle"},
        {"cones", "stretching-criterion"},
        {"cones", "model-cone-invariance"},
        {"blender", "m-r-fixtures"},
        {"blender", "box-geometry"},
        {"blender", "axiom-a"},
        {"blender", "axiom-b"},
        {"blender", "axiom-c"},
        {"blender", "axiom-d"},
        {"blender", "axiom-e"},
        {"blender", "axiom-f"},
        {"blender", "distinctive-property"},
        {"holonomy", "leaf-flatness"},
        {"holonomy", "leaf-depth-contraction"},
        {"holonomy", "holonomy-identity"},
        {"holonomy", "holder-estimate"},
        {"holonomy", "equivariance"},
        {"holonomy", "composition"},
        {"suspension", "characteristic-identity"},
        {"suspension", "return-map-identity"},
        {"suspension", "return-kernel"},
        {"suspension", "c1-scaling"},
        {"suspension", "bridge-verdicts"},
        {"transitivity", "determinism"},
        {"transitivity", "identity-map"},
        {"transitivity", "cat-map"},
        {"transitivity", "rotation-quarter"},
        {"transitivity", "golden-rotation"},
        {"transitivity", "dividing-witness"},
        {"transitivity", "oracle-agreement"},
        {"transitivity", "refinement-monotonicity"},
        {"embeddings", "disk-identity"},
        {"embeddings", "cosphere-stages"},
    };
    return reg;
}

std::vector<std::string> missing_checks(const Report& r, const std::vector<std::string>& suites) {
    std::vector<std::string> missing;
    for (const auto& [suite, name] : registered_checks()) {
        bool wanted = false;
        for (const auto& s : suites) wanted = wanted || (s == suite);
        if (!wanted) continue;
        bool found = false;
        for (const auto& rec : r.records) found = found || (rec.suite == suite && rec.name == name);
        if (!found) missing.push_back(suite + "/" + name);
    }
    return missing;
}

}  // namespace cbl
