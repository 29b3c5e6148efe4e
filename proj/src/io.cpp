#include "moments/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace moments {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& data) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string measure_to_json(const DiscreteMeasure& mu) {
    json j;
    j["dim"] = mu.dim;
    j["atoms"] = mu.atoms;
    j["weights"] = mu.weights;
    return j.dump(2) + "\n";
}

DiscreteMeasure measure_from_json(const std::string& text) {
    const json j = json::parse(text);
    DiscreteMeasure mu;
    mu.dim = j.at("dim").get<int>();
    mu.atoms = j.at("atoms").get<std::vector<Vec>>();
    mu.weights = j.at("weights").get<std::vector<double>>();
    if (mu.atoms.size() != mu.weights.size())
        throw std::runtime_error("measure: atoms/weights length mismatch");
    for (const auto& a : mu.atoms)
        if (static_cast<int>(a.size()) != mu.dim)
            throw std::runtime_error("measure: atom dimension mismatch");
    return mu;
}

std::string measure_to_csv(const DiscreteMeasure& mu) {
    std::ostringstream ss;
    for (int i = 0; i < mu.size(); ++i) {
        for (int k = 0; k < mu.dim; ++k) ss << fmt17(mu.atoms[i][k]) << ",";
        ss << fmt17(mu.weights[i]) << "\n";
    }
    return ss.str();
}

DiscreteMeasure measure_from_csv(const std::string& text) {
    DiscreteMeasure mu;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw std::runtime_error("measure csv: short row");
        if (mu.dim == 0) mu.dim = static_cast<int>(row.size()) - 1;
        if (static_cast<int>(row.size()) != mu.dim + 1)
            throw std::runtime_error("measure csv: ragged rows");
        mu.atoms.emplace_back(row.begin(), row.end() - 1);
        mu.weights.push_back(row.back());
    }
    if (mu.atoms.empty()) throw std::runtime_error("measure csv: no rows");
    return mu;
}

DiscreteMeasure load_measure(const std::string& path) {
    const std::string text = read_file(path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return measure_from_csv(text);
    return measure_from_json(text);
}

std::string potential_to_json(const PolyhedralPotential& p) {
    json j;
    j["dim"] = p.dim;
    j["atoms"] = p.atoms;
    j["values"] = p.values;
    return j.dump(2) + "\n";
}

PolyhedralPotential potential_from_json(const std::string& text) {
    const json j = json::parse(text);
    PolyhedralPotential p;
    p.dim = j.at("dim").get<int>();
    p.atoms = j.at("atoms").get<std::vector<Vec>>();
    p.values = j.at("values").get<std::vector<double>>();
    validate_potential(p);
    return p;
}

std::string estimate_to_csv(const MomentMeasureEstimate& m) {
    std::ostringstream ss;
    ss << "#";
    for (int k = 0; k < m.dim; ++k) ss << " y" << k << ",";
    ss << " weight\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (int k = 0; k < m.dim; ++k)
            ss << fmt17(m.coords[i * static_cast<std::size_t>(m.dim) + k]) << ",";
        ss << fmt17(m.weights[i]) << "\n";
    }
    return ss.str();
}

MomentMeasureEstimate estimate_from_csv(const std::string& text) {
    const DiscreteMeasure mu = measure_from_csv(text);
    MomentMeasureEstimate m;
    m.dim = mu.dim;
    for (int i = 0; i < mu.size(); ++i) {
        for (int k = 0; k < mu.dim; ++k) m.coords.push_back(mu.atoms[i][k]);
        m.weights.push_back(mu.weights[i]);
    }
    m.barycenter.assign(m.dim, 0.0);
    m.barycenter_se.assign(m.dim, 0.0);
    double w = 0.0;
    for (double x : m.weights) w += x;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (int k = 0; k < m.dim; ++k)
            m.barycenter[k] += m.weights[i] / w * m.coords[i * m.dim + k];
    return m;
}

std::string solve_report_to_json(const SolveReport& rep) {
    json j;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["final_objective"] = rep.final_objective;
    j["final_grad_inf_norm"] = rep.final_grad_norm;
    j["wall_time_s"] = rep.wall_time_s;
    j["final_masses"] = rep.final_masses;
    j["gauge"] = {{"translation", rep.gauge.translation},
                  {"constant", rep.gauge.constant}};
    return j.dump(2) + "\n";
}

std::string validation_report_to_json(const ValidationReport& rep) {
    json j;
    j["mass_ok"] = rep.mass_ok;
    j["span_ok"] = rep.span_ok;
    j["barycenter_ok"] = rep.barycenter_ok;
    j["barycenter"] = rep.barycenter_vector;
    j["smallest_singular_value"] = rep.smallest_singular_value;
    return j.dump(2) + "\n";
}

std::string trace_to_csv(const SolveReport& rep) {
    std::ostringstream ss;
    ss << "iter,objective,grad_inf_norm\n";
    for (std::size_t i = 0; i < rep.objective_trace.size(); ++i)
        ss << i << "," << fmt17(rep.objective_trace[i]) << ","
           << fmt17(rep.grad_norm_trace[i]) << "\n";
    return ss.str();
}

std::string cells_to_csv(const CellDecomposition& decomp) {
    std::ostringstream ss;
    ss << "atom_index,n_vertices,vertices...,n_rays,rays...\n";
    for (const auto& c : decomp.cells) {
        if (c.empty) continue;
        ss << c.atom_index << "," << c.vertices.size();
        for (const Pt2& v : c.vertices) ss << "," << fmt17(v.x) << "," << fmt17(v.y);
        ss << "," << c.rays.size();
        for (const Pt2& r : c.rays) ss << "," << fmt17(r.x) << "," << fmt17(r.y);
        ss << "\n";
    }
    return ss.str();
}

std::string ledger_to_csv(const std::vector<CheckResult>& results) {
    std::ostringstream ss;
    ss << "name,lhs,rhs,margin,tolerance,pass,metadata\n";
    for (const auto& r : results) {
        std::string meta = r.metadata;
        for (char& c : meta)
            if (c == ',' || c == '\n') c = ';';
        ss << r.name << "," << fmt17(r.lhs) << "," << fmt17(r.rhs) << ","
           << fmt17(r.margin) << "," << fmt17(r.tolerance) << ","
           << (r.pass ? 1 : 0) << "," << meta << "\n";
    }
    return ss.str();
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

double Config::get(const std::string& key, double fallback) const {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

int Config::get(const std::string& key, int fallback) const {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoi(it->second);
}

Config parse_config(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.kv[key] = val;
    }
    return cfg;
}

SolverConfig to_solver_config(const Config& cfg) {
    SolverConfig sc;
    sc.gradient_tol = cfg.get("gradient_tol", sc.gradient_tol);
    sc.max_iters = cfg.get("max_iters", sc.max_iters);
    sc.ls_backtrack = cfg.get("ls_backtrack", sc.ls_backtrack);
    sc.ls_sufficient = cfg.get("ls_sufficient", sc.ls_sufficient);
    sc.use_mc = cfg.get("quadrature", std::string("exact")) == "mc";
    sc.mc_samples = static_cast<std::size_t>(
        cfg.get("mc_samples", static_cast<double>(sc.mc_samples)));
    sc.memory = cfg.get("memory", sc.memory);
    sc.seed = static_cast<std::uint64_t>(cfg.get("seed", 1.0));
    sc.threads = cfg.get("threads", sc.threads);
    sc.r_policy.rel_tol = cfg.get("tail_rel_tol", sc.r_policy.rel_tol);
    return sc;
}

std::map<std::string, std::string> config_snapshot(const SolverConfig& cfg) {
    std::map<std::string, std::string> m;
    m["gradient_tol"] = fmt17(cfg.gradient_tol);
    m["max_iters"] = std::to_string(cfg.max_iters);
    m["ls_backtrack"] = fmt17(cfg.ls_backtrack);
    m["ls_sufficient"] = fmt17(cfg.ls_sufficient);
    m["quadrature"] = cfg.use_mc ? "mc" : "exact";
    m["mc_samples"] = std::to_string(cfg.mc_samples);
    m["memory"] = std::to_string(cfg.memory);
    m["seed"] = std::to_string(cfg.seed);
    m["threads"] = std::to_string(cfg.threads);
    m["tail_rel_tol"] = fmt17(cfg.r_policy.rel_tol);
    return m;
}

std::string manifest_to_json(const RunManifest& m) {
    json j;
    j["command"] = m.command;
    j["tool_version"] = kToolVersion;
    j["seed"] = m.seed;
    j["config"] = m.config;
    json inputs = json::array();
    for (const auto& [path, hash] : m.inputs)
        inputs.push_back({{"path", path}, {"fnv1a64", hash}});
    j["inputs"] = inputs;
    j["outputs"] = m.outputs;
    j["wall_time_s"] = m.wall_time_s;
    return j.dump(2) + "\n";
}

}  // namespace moments
