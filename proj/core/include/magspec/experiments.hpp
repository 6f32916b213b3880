#pragma once

#include "magspec/agmon.hpp"
#include "magspec/bounds.hpp"
#include "magspec/io.hpp"
#include "magspec/svg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace magspec::experiments {

using json = nlohmann::json;

enum class Scenario { Asymptotic, Helical, LargeDomain, Agmon };
std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct ExperimentConfig {
    Scenario scenario = Scenario::Asymptotic;
    json domain;
    json field;

    std::vector<double> q; ///< asymptotic, agmon; large_domain uses q.front()
    // helical regime
    std::vector<double> qtau;
    std::vector<double> tau; ///< empty: tau = c0 (q tau)^x, single entry: broadcast
    double x = 0.0;
    int rotations = 32;
    std::string helical_mode = "auto"; ///< auto | 2d | 3d
    // large-domain regime
    std::vector<double> R;
    double y = 0.0;
    Vec3 x0 = Vec3::Zero();
    double c0 = 1.0;

    std::optional<double> h; ///< absent: 0.4 / sqrt(q_max)
    double tol = 1e-8;
    int max_iter = 3000;
    std::string preconditioner = "auto";

    double C = 1.0;
    std::optional<double> epsilon;
    std::optional<double> delta;
    bool quasimode = true;
    double cutoff_scale = 4.0;
    bool refine = false; ///< repeat each job at h/2

    // agmon post-processing
    double gamma = 0.25;
    double alpha_frac = 0.5; ///< alpha = alpha_frac (1 - Theta0)^{1/2} sqrt(q)
    double agmon_eps = 1.0;

    degennes::HalfLineDiscretization model{20.0, 1e-3};
    double model_tol = 1e-6;

    std::string csv;
    std::string manifest;
    std::string svg;
    int threads = 1;
    std::uint64_t seed = 0;

    static ExperimentConfig from_json(const json& j);
    json to_json() const;
    /// Validation including the regime guards; throws before any compute.
    void validate() const;
    double grid_spacing() const;
};

struct CsvRow {
    double q = 0, tau_or_R = 0, lambda = 0, certificate = 0, lower_rhs = 0, upper_rhs = 0, h = 0, residual = 0;
};

struct JobRecord {
    int id = 0;
    std::string status = "pending"; ///< ok | failed
    bool converged = false;
    double wall_seconds = 0.0;
    json params;
    json refinement;
    json extra;
    std::string error;
    int csv_row = -1;
};

struct RunManifest {
    std::string config_hash;
    json versions;
    Scenario scenario = Scenario::Asymptotic;
    double theta0 = 0.0;
    double xi0 = 0.0;
    json exponents;
    std::vector<JobRecord> jobs;
    json to_json() const;
    bool all_converged() const;
};

struct RunResult {
    RunManifest manifest;
    std::vector<CsvRow> rows;
    std::string csv;
    std::string svg;
    std::vector<std::pair<std::string, std::string>> side_files; ///< path, contents
};

struct RunOptions {
    bool dry_run = false;
    bool write_files = true;
    std::optional<int> threads;
};

inline const char* csv_header = "q,tau_or_R,lambda,certificate,lower_rhs,upper_rhs,h,residual";
inline const char* agmon_csv_header = "d_shell,max_abs_u,log_max,fitted_slope,theoretical_rate";

std::string format_row(const CsvRow& r);
std::string agmon_csv(const agmon::DecayReport& rep);

/// Hex SHA-256 of the canonical (sorted-key) JSON dump.
std::string config_hash(const json& j);
std::string sha256_hex(const std::string& data);

RunResult run(const ExperimentConfig& cfg, const RunOptions& opts = {});

} // namespace magspec::experiments
