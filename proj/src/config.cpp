#include "cbl/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cbl {

void RunConfig::validate() const {
    chart.validate();
    model.validate(chart);
    if (r_values.empty()) throw std::invalid_argument("run.r_values must be non-empty");
    for (double r : r_values)
        if (!(r > 0.0) || r > model.r_max + 1e-12)
            throw std::invalid_argument("run.r_values entries must lie in (0, model.r_max]");
    if (!(cone_eps > 0.0 && cone_eps < 1.0))
        throw std::invalid_argument("run.cone_eps must lie in (0, 1)");
    if (grid_cells < 8) throw std::invalid_argument("run.grid_cells must be >= 8");
    static const std::vector<std::string> known{"chart",    "flows",      "model",
                                               "cones",    "blender",    "holonomy",
                                               "suspension", "transitivity", "embeddings"};
    for (const auto& s : suites) {
        bool ok = false;
        for (const auto& k : known) ok = ok || (s == k);
        if (!ok) throw std::invalid_argument("run.suites: unknown suite '" + s + "'");
    }
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "[chart]\n"
       << "n = " << chart.n << "\nL = " << chart.L << "\ndelta = " << chart.delta
       << "\neps_u = " << chart.eps_u << "\ns_halfwidth = " << chart.s_halfwidth << "\n";
    os << "[model]\n"
       << "lambda = " << model.lambda << "\nN = " << model.N << "\nmu = " << model.mu
       << "\nk0 = " << model.k0 << "\nm = " << model.m << "\nx_u = " << model.x_u[0]
       << "\nr_max = " << model.r_max << "\nw_s = " << model.w_s << "\nw_t = " << model.w_t
       << "\nw_u = " << model.w_u << "\n";
    os << "[run]\nseed = " << seed << "\nr_values =";
    for (size_t i = 0; i < r_values.size(); ++i) os << (i ? "," : " ") << r_values[i];
    os << "\nsuites =";
    for (size_t i = 0; i < suites.size(); ++i) os << (i ? "," : " ") << suites[i];
    os << "\ncone_eps = " << cone_eps << "\ngrid_cells = " << grid_cells
       << "\nout_dir = " << out_dir << "\n";
    return os.str();
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_num(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: cannot parse number for " + section + "." + key +
                                    ": '" + v + "'");
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        auto num = [&] { return parse_num(section, key, val); };
        if (section == "chart") {
            if (key == "n") cfg.chart.n = static_cast<int>(num());
            else if (key == "L") cfg.chart.L = num();
            else if (key == "delta") cfg.chart.delta = num();
            else if (key == "eps_u") cfg.chart.eps_u = num();
            else if (key == "s_halfwidth") cfg.chart.s_halfwidth = num();
            else throw std::invalid_argument("config: unknown key chart." + key);
        } else if (section == "model") {
            if (key == "lambda") cfg.model.lambda = num();
            else if (key == "N") cfg.model.N = static_cast<int>(num());
            else if (key == "mu") cfg.model.mu = num();
            else if (key == "k0") cfg.model.k0 = static_cast<int>(num());
            else if (key == "m") cfg.model.m = static_cast<int>(num());
            else if (key == "x_u") cfg.model.x_u = Vec{num()};
            else if (key == "r_max") cfg.model.r_max = num();
            else if (key == "w_s") cfg.model.w_s = num();
            else if (key == "w_t") cfg.model.w_t = num();
            else if (key == "w_u") cfg.model.w_u = num();
            else throw std::invalid_argument("config: unknown key model." + key);
        } else if (section == "run") {
            if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num());
            else if (key == "r_values") {
                cfg.r_values.clear();
                for (const auto& item : split(val, ','))
                    cfg.r_values.push_back(parse_num(section, key, item));
            } else if (key == "suites") {
                cfg.suites = split(val, ',');
            } else if (key == "out_dir") {
                cfg.out_dir = val;
            } else if (key == "cone_eps") {
                cfg.cone_eps = num();
            } else if (key == "grid_cells") {
                cfg.grid_cells = static_cast<int>(num());
            } else {
                throw std::invalid_argument("config: unknown key run." + key);
            }
        } else {
            throw std::invalid_argument("config: unknown section [" + section + "]");
        }
    }
    // Keep x_u sized to chart.n.
    if (cfg.model.x_u.n != cfg.chart.n) {
        Vec x(cfg.chart.n);
        x[0] = cfg.model.x_u.n > 0 ? cfg.model.x_u[0] : 0.05;
        cfg.model.x_u = x;
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace cbl
