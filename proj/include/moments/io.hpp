#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "moments/diagnostics.hpp"
#include "moments/forward.hpp"
#include "moments/measure.hpp"
#include "moments/potential.hpp"
#include "moments/solver.hpp"

namespace moments {

inline constexpr const char* kToolVersion = "0.1.0";

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

std::string measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const std::string& text);
std::string measure_to_csv(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_csv(const std::string& text);
DiscreteMeasure load_measure(const std::string& path);  // by extension

std::string potential_to_json(const PolyhedralPotential& p);
PolyhedralPotential potential_from_json(const std::string& text);

std::string estimate_to_csv(const MomentMeasureEstimate& m);
MomentMeasureEstimate estimate_from_csv(const std::string& text);

std::string solve_report_to_json(const SolveReport& rep);
std::string validation_report_to_json(const ValidationReport& rep);
std::string trace_to_csv(const SolveReport& rep);
std::string cells_to_csv(const CellDecomposition& decomp);
std::string ledger_to_csv(const std::vector<CheckResult>& results);

// Flat key = value configuration (one pair per line, '#' comments).
struct Config {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get(const std::string& key, double fallback) const;
    int get(const std::string& key, int fallback) const;
};

Config parse_config(const std::string& text);
SolverConfig to_solver_config(const Config& cfg);
// Full key/value snapshot with defaults filled in.
std::map<std::string, std::string> config_snapshot(const SolverConfig& cfg);

struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, hash
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;
};

std::string manifest_to_json(const RunManifest& m);

}  // namespace moments
