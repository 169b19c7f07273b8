#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgg/types.hpp"

namespace mgg {

struct Ladder {
    double r_min = 10.0;
    double r_max = 1e4;
    int n_rings = 40;
    int n_theta = 256;
};

/// Parsed run configuration. Unknown keys are rejected.
struct RunConfig {
    std::string scenario = "verify-all";
    std::optional<nlohmann::json> solution;
    Ladder ladder;
    std::map<std::string, double> tolerances;
    std::string out_dir = ".";
    std::string format = "json";
    int threads = 1;
    std::uint64_t seed = 12345;

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load_file(const std::string& path);
    void validate() const;
    nlohmann::json echo() const;
};

struct CoeffRow {
    std::string name;
    double value = 0.0;
    double error = 0.0;
    std::optional<double> oracle;
    bool pass = true;
};

struct FluxRow {
    std::string formula;
    double radius = 0.0;
    double d = 0.0;
};

struct CertRow {
    std::string name;
    double value = 0.0;
};

struct LedgerRow {
    std::string id;
    std::string note;
    std::map<std::string, double> evidence;
};

struct CheckRow {
    std::string name;  // names the invariant under test
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Report {
    nlohmann::json config_echo;
    std::string scenario;
    std::vector<CoeffRow> coefficients;
    std::vector<FluxRow> flux;
    std::vector<CertRow> certificates;
    std::vector<LedgerRow> discrepancies;
    std::vector<CheckRow> checks;
    std::map<std::string, std::string> ring_files;  // name -> csv payload
    double wall_clock_seconds = 0.0;  // console only, never serialized

    bool all_pass() const;
    nlohmann::json to_json() const;
};

Report run(const RunConfig& config);

/// Write report.json (canonical form) and, for format "csv", the table files
/// and ring dumps into out_dir.
void emit(const Report& report, const std::string& out_dir,
          const std::string& format);

/// Canonical JSON text: sorted keys, floats at 17 significant digits.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace mgg
