#pragma once

// Batch runs: JSON configuration in, JSON report (and optional CSV dumps) out.

#include "mvop/darboux.hpp"
#include "mvop/irreducibility.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mvop {

using Json = nlohmann::json;

enum class Backend { Float, Exact };

enum class Check { Orth, Norm, Recurrence, Eigen, Darboux, Det, Reduce, Symmetries };

std::string_view to_string(Backend b);
std::string_view to_string(Check c);

struct RunConfig {
    WeightSpec spec;
    Backend backend = Backend::Float;
    int n_max = 10;
    double tol = 1e-9;
    std::vector<Check> checks;
    int symmetry_points = 0;   // 0: 4N^2 + 8
    std::string out;
    std::string csv_dir;

    /// Throws ConfigError when a requested check does not apply to the weight.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

Json config_to_json(const RunConfig& cfg);
/// Throws ConfigError on schema violations.
RunConfig config_from_json(const Json& j);

/// JSON Schema of the configuration file.
std::string config_schema();

struct CheckResult {
    Check check;
    bool pass = false;
    double worst = 0.0;
    std::string error;   // set when the check threw
    Json details;
};

struct RunReport {
    RunConfig config;
    std::vector<CheckResult> results;
    bool pass = false;
    double wall_seconds = 0.0;

    Json to_json() const;
};

/// Runs every requested check; writes cfg.out and CSV dumps when the paths are set (IoError on failure).
RunReport run(const RunConfig& cfg);

template <class T>
Json matrix_json(const Matrix<T>& m);
template <class T>
Json operator_json(const MatrixDiffOperator<T>& op);
Json eigen_report_json(const EigenReport& r);
Json orthogonality_json(const OrthogonalityReport& r);
Json darboux_json(const DarbouxReport& r);
Json symmetry_json(const SymmetrySpace& s);

}  // namespace mvop
