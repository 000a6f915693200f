#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparse_rank/model.hpp"

namespace sparse_rank {

enum class Experiment { FullRank, RankFormula, NullityTernary, PhiCurve };
enum class GraphModel { Simple, Pairing };

struct ExperimentConfig {
    explicit ExperimentConfig(ModelSpec model_spec) : spec(std::move(model_spec)) {}

    ModelSpec spec;
    Experiment experiment = Experiment::FullRank;
    GraphModel model = GraphModel::Simple;
    std::vector<int> n_values;
    int trials = 1;
    std::uint64_t seed = 0;
    double delta = 0.0;
    int jobs = 1;
    int curve_points = 101;
    long long degree_tries = 0;  // 0 selects the sampler default
    long long graph_tries = 1'000'000;
    bool require_divisible = false;
    std::string out_path;
};

/// Distribution object: {"kind": "fixed", "value": 3}, {"kind": "poisson",
/// "mean": 2.5}, {"kind": "powerlaw", "alpha": 3.5, "kmin": 3},
/// {"kind": "table", "atoms": [[3, 0.5], [4, 0.5]]}. "tol" is optional.
/// Coefficient law "chi": "uniform" (default), "one", or [[code, prob], ...].
/// Throws Error(BadConfig).
ModelSpec parse_model(const std::string& json_text);
ExperimentConfig parse_config(const std::string& json_text);

std::string to_string(Experiment e);

/// Per-trial stream seed: seed xor mix64((n << 32) | trial).
std::uint64_t trial_seed(std::uint64_t seed, int n, int trial);

struct Interval {
    double lo;
    double hi;
};
/// Wilson score interval at z = 1.96.
Interval wilson_interval(long long successes, long long total, double z = 1.959963984540054);

struct TrialRecord {
    int n = 0;
    int trial = 0;
    int m = 0;
    int rank = 0;
    int nullity = 0;
    int frozen_count = 0;
    bool full_row_rank = false;
    std::uint64_t seed_used = 0;
    long long wall_ms = 0;
    // nullity_ternary only
    int rows_added = 0;
    int nullity_after = 0;
    int max_nullity_drop = 0;
    std::string error;  // empty for completed trials

    bool completed() const noexcept { return error.empty(); }
};

struct SummaryRecord {
    int n = 0;
    int completed = 0;
    int skipped = 0;
    int full_count = 0;
    Interval rate_ci{0.0, 0.0};
    double mean_rank_over_n = 0.0;
    double mean_nullity_over_n = 0.0;
    double mean_nullity_after_over_n = 0.0;
    double predicted = 0.0;  // 1 - max Phi, or 1 - d/k - delta
    double deviation = 0.0;
    double rate() const noexcept { return completed ? static_cast<double>(full_count) / completed : 0.0; }
};

struct CurvePoint {
    double z;
    double phi;
};

struct ExperimentResult {
    std::vector<TrialRecord> trials;  // sorted by (n, trial)
    std::vector<SummaryRecord> summaries;
    std::vector<CurvePoint> curve;
    bool any_n_without_data() const noexcept;
};

/// Runs the configured experiment. nullity_ternary refuses (BadConfig) when
/// the full-rank condition fails for the spec.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV with a "# sparse-rank v1, seed=..." header line; trial rows, then a
/// "# summary" block. include_timing = false drops wall_ms.
void write_csv(std::ostream& out, const ExperimentConfig& config, const ExperimentResult& result,
               bool include_timing = true);

}  // namespace sparse_rank
