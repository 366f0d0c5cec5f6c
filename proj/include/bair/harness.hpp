#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bair/algorithms.hpp"
#include "bair/instance.hpp"
#include "bair/track_and_stop.hpp"

#include <json.hpp>

namespace bair {

enum class AlgoId : int { Bair = 1, Uni = 2, Exp3 = 3, TrackStop = 4 };

std::string algo_name(AlgoId id);
AlgoId algo_from_name(const std::string& name);  // throws UnknownAlgorithm

// One experiment configuration: a (delta, K, gap) grid point with the user
// parameters, the contenders, and the replication plan.
struct ExperimentCell {
    double delta = 0.1;
    int k = 2;
    double gap = 0.5;
    double alpha = 1.0;
    RhoPolicy rho = RhoPolicy::linear_acceptance();
    double noise_p = 0.0;
    std::vector<AlgoId> algos{AlgoId::Bair};
    int replications = 1000;  // independent problem instances, one run each
    std::uint64_t master_seed = 20240001;
    std::optional<std::int64_t> n1_override;
    std::optional<int> m_override;
    int threads = 1;
    // Fixed-horizon baselines get the identifier's mean stopping time on the
    // same instance; this switches to the cell-wide mean instead.
    bool cell_mean_budget = false;

    UserParams user_params() const;
    std::int64_t ts_t_max() const;  // cap for the fixed-confidence baseline
};

struct ReplicationRecord {
    int instance_index = 0;
    AlgoId algo = AlgoId::Bair;
    std::uint64_t seed = 0;
    AlgorithmOutcome outcome;
    bool success = false;

    bool operator==(const ReplicationRecord&) const = default;
};

struct MetricsSummary {
    AlgoId algo = AlgoId::Bair;
    int reps = 0;
    double success_rate = 0.0;
    double failure_ratio = 0.0;  // (1 - success_rate) / delta
    double mean_stop_time = 0.0;
    double stop_time_se = 0.0;
    double mean_rejection_rate = 0.0;
};

struct CellResult {
    ExperimentCell cell;
    std::vector<MetricsSummary> summaries;             // one per algorithm, cell order
    std::vector<std::vector<ReplicationRecord>> records;  // [algorithm][instance]
};

// Runs one algorithm once on one instance. Fixed-horizon algorithms need
// `horizon`; identifiers ignore it. Throws KMismatch when the instance does
// not match the cell.
ReplicationRecord run_replication(const ExperimentCell& cell, const BanditInstance& instance,
                                  AlgoId algo, std::uint64_t seed,
                                  std::optional<std::int64_t> horizon = std::nullopt);

// Two-pass protocol: identifiers (their own stopping rules) run first over
// every instance; fixed-horizon baselines then replay the same instances
// with the matched budget. Aggregation order is fixed by instance index, so
// results are independent of the execution schedule.
CellResult run_cell(const ExperimentCell& cell);

// Ablation: one shared sweeping phase per instance; every contender then
// continues from a byte-identical copy of the prepared user. Reported
// stopping times and rejection rates cover the post-preparation segment.
CellResult run_shared_phase1_cell(const ExperimentCell& cell);

enum class EmitFormat { Csv, Json };
EmitFormat emit_format_from_name(const std::string& name);  // throws UnsupportedFormat

// Renders one row per (cell, algorithm) with 6 significant digits. Throws
// EmptyInput when there is nothing to emit.
std::string emit_results(const std::vector<CellResult>& results, EmitFormat format);

// Parses {"cells": [...]} experiment grids. Unknown algorithm names list
// the valid ones.
std::vector<ExperimentCell> cells_from_json(const nlohmann::json& config);
nlohmann::json cell_to_json(const ExperimentCell& cell);

}  // namespace bair
