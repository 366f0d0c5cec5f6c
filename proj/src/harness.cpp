#include "bair/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <thread>

namespace bair {

namespace {

// Runs body(i) for i in [0, n) across `threads` workers. Work items are
// independent and write to disjoint slots, so scheduling cannot affect the
// aggregated output.
void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

MetricsSummary summarize(AlgoId algo, double delta,
                         const std::vector<ReplicationRecord>& records) {
    MetricsSummary s;
    s.algo = algo;
    s.reps = static_cast<int>(records.size());
    if (records.empty()) return s;
    double successes = 0.0, stop_sum = 0.0, stop_sq = 0.0, rej_sum = 0.0;
    for (const auto& r : records) {
        successes += r.success ? 1.0 : 0.0;
        const auto steps = static_cast<double>(r.outcome.total_steps);
        stop_sum += steps;
        stop_sq += steps * steps;
        rej_sum += steps > 0 ? static_cast<double>(r.outcome.total_rejections) / steps : 0.0;
    }
    const auto n = static_cast<double>(records.size());
    s.success_rate = successes / n;
    s.failure_ratio = (1.0 - s.success_rate) / delta;
    s.mean_stop_time = stop_sum / n;
    const double var = std::max(0.0, (stop_sq - n * s.mean_stop_time * s.mean_stop_time) /
                                         std::max(1.0, n - 1.0));
    s.stop_time_se = std::sqrt(var / n);
    s.mean_rejection_rate = rej_sum / n;
    return s;
}

bool is_fixed_horizon(AlgoId algo) { return algo == AlgoId::Uni || algo == AlgoId::Exp3; }

}  // namespace

std::string algo_name(AlgoId id) {
    switch (id) {
        case AlgoId::Bair: return "bair";
        case AlgoId::Uni: return "uni";
        case AlgoId::Exp3: return "exp3";
        case AlgoId::TrackStop: return "ts";
    }
    return "?";
}

AlgoId algo_from_name(const std::string& name) {
    if (name == "bair") return AlgoId::Bair;
    if (name == "uni") return AlgoId::Uni;
    if (name == "exp3") return AlgoId::Exp3;
    if (name == "ts" || name == "track_and_stop") return AlgoId::TrackStop;
    throw std::invalid_argument("UnknownAlgorithm: '" + name +
                                "' (valid names: bair, uni, exp3, ts)");
}

UserParams ExperimentCell::user_params() const {
    UserParams p;
    p.alpha = alpha;
    p.rho = rho;
    p.noise_p = noise_p;
    if (!(alpha > 0.0)) throw std::invalid_argument("InvalidAlpha: alpha must be > 0");
    if (noise_p < 0.0 || noise_p >= 1.0)
        throw std::invalid_argument("InvalidNoise: noise_p must be in [0, 1)");
    return p;
}

std::int64_t ExperimentCell::ts_t_max() const {
    return 200 * default_n1(k, delta, 1.0, rho.lo());
}

ReplicationRecord run_replication(const ExperimentCell& cell, const BanditInstance& instance,
                                  AlgoId algo, std::uint64_t seed,
                                  std::optional<std::int64_t> horizon) {
    if (instance.K() != cell.k)
        throw std::invalid_argument("KMismatch: instance arm count differs from the cell");
    UserSession session(instance, cell.user_params(), seed);
    RngStream policy_rng(derive_seed(seed, stream_tag::kPolicy));

    AlgorithmOutcome outcome;
    switch (algo) {
        case AlgoId::Bair: {
            BairOptions opt;
            opt.n1_override = cell.n1_override;
            if (cell.m_override) opt.m = cell.m_override;
            outcome = run_bair(session, cell.delta, opt);
            break;
        }
        case AlgoId::Uni: {
            if (!horizon) throw std::invalid_argument("InvalidBudget: uni needs a horizon");
            outcome = uniform_explore(session, *horizon, policy_rng);
            break;
        }
        case AlgoId::Exp3: {
            if (!horizon) throw std::invalid_argument("InvalidBudget: exp3 needs a horizon");
            outcome = exp3(session, *horizon, policy_rng);
            break;
        }
        case AlgoId::TrackStop: {
            TrackStopOptions opt;
            opt.t_max = cell.ts_t_max();
            outcome = track_and_stop(session, cell.delta, opt);
            break;
        }
    }

    ReplicationRecord record;
    record.instance_index = -1;
    record.algo = algo;
    record.seed = seed;
    record.success = outcome.chosen_arm == instance.best_arm();
    record.outcome = std::move(outcome);
    return record;
}

CellResult run_cell(const ExperimentCell& cell) {
    if (cell.algos.empty()) throw std::invalid_argument("EmptyAlgorithmList: nothing to run");
    if (cell.replications < 1)
        throw std::invalid_argument("InvalidCount: replications must be >= 1");

    const auto instances =
        generate_instance_batch(cell.k, cell.gap, cell.replications, cell.master_seed);
    const bool wants_horizon =
        std::any_of(cell.algos.begin(), cell.algos.end(), is_fixed_horizon);
    const bool has_bair =
        std::find(cell.algos.begin(), cell.algos.end(), AlgoId::Bair) != cell.algos.end();
    if (wants_horizon && !has_bair)
        throw std::invalid_argument(
            "MissingBudgetSource: uni/exp3 horizons are matched to bair; include bair in algos");

    CellResult result;
    result.cell = cell;

    const auto run_pass = [&](AlgoId algo, const std::vector<std::int64_t>* horizons) {
        std::vector<ReplicationRecord> records(static_cast<std::size_t>(cell.replications));
        parallel_for(cell.replications, cell.threads, [&](int i) {
            const std::uint64_t seed =
                derive_seed(cell.master_seed, static_cast<std::uint64_t>(i), 0,
                            static_cast<std::uint64_t>(algo));
            std::optional<std::int64_t> horizon;
            if (horizons) horizon = (*horizons)[static_cast<std::size_t>(i)];
            records[static_cast<std::size_t>(i)] =
                run_replication(cell, instances[static_cast<std::size_t>(i)], algo, seed, horizon);
            records[static_cast<std::size_t>(i)].instance_index = i;
        });
        return records;
    };

    // Pass 1: algorithms with their own stopping rules.
    std::vector<std::int64_t> matched_horizons;
    std::vector<std::vector<ReplicationRecord>> by_algo(cell.algos.size());
    for (std::size_t ai = 0; ai < cell.algos.size(); ++ai) {
        if (is_fixed_horizon(cell.algos[ai])) continue;
        by_algo[ai] = run_pass(cell.algos[ai], nullptr);
        if (cell.algos[ai] == AlgoId::Bair) {
            matched_horizons.resize(static_cast<std::size_t>(cell.replications));
            double cell_mean = 0.0;
            for (const auto& r : by_algo[ai])
                cell_mean += static_cast<double>(r.outcome.total_steps);
            cell_mean /= static_cast<double>(cell.replications);
            for (int i = 0; i < cell.replications; ++i) {
                const double t = cell.cell_mean_budget
                                     ? cell_mean
                                     : static_cast<double>(
                                           by_algo[ai][static_cast<std::size_t>(i)].outcome.total_steps);
                matched_horizons[static_cast<std::size_t>(i)] =
                    std::max<std::int64_t>(1, std::llround(t));
            }
        }
    }

    // Pass 2: fixed-horizon baselines on the matched budget.
    for (std::size_t ai = 0; ai < cell.algos.size(); ++ai) {
        if (!is_fixed_horizon(cell.algos[ai])) continue;
        by_algo[ai] = run_pass(cell.algos[ai], &matched_horizons);
    }

    for (std::size_t ai = 0; ai < cell.algos.size(); ++ai) {
        result.summaries.push_back(summarize(cell.algos[ai], cell.delta, by_algo[ai]));
    }
    result.records = std::move(by_algo);
    return result;
}

CellResult run_shared_phase1_cell(const ExperimentCell& cell) {
    if (cell.algos.empty()) throw std::invalid_argument("EmptyAlgorithmList: nothing to run");
    if (cell.replications < 1)
        throw std::invalid_argument("InvalidCount: replications must be >= 1");

    const auto instances =
        generate_instance_batch(cell.k, cell.gap, cell.replications, cell.master_seed);
    const UserParams params = cell.user_params();
    const std::int64_t n1 =
        cell.n1_override.value_or(default_n1(cell.k, cell.delta, cell.alpha, cell.rho.lo()));
    const int m = cell.m_override.value_or(default_m(cell.k, cell.delta, cell.noise_p));

    std::vector<std::vector<ReplicationRecord>> by_algo(
        cell.algos.size(), std::vector<ReplicationRecord>(static_cast<std::size_t>(cell.replications)));

    parallel_for(cell.replications, cell.threads, [&](int i) {
        const auto& instance = instances[static_cast<std::size_t>(i)];
        const std::uint64_t bair_seed = derive_seed(
            cell.master_seed, static_cast<std::uint64_t>(i), 0,
            static_cast<std::uint64_t>(AlgoId::Bair));

        // One shared preparation run, then the identifier's elimination
        // phase continues on the same session.
        UserSession bair_session(instance, params, bair_seed);
        const Phase1Output phase1 = phase1_sweep(bair_session, n1);
        const UserState prepared = bair_session.state();
        const Phase2Result phase2 = phase2_eliminate(bair_session, phase1.accept_counts, m);
        const std::int64_t budget = std::max<std::int64_t>(1, phase2.steps);

        for (std::size_t ai = 0; ai < cell.algos.size(); ++ai) {
            const AlgoId algo = cell.algos[ai];
            ReplicationRecord rec;
            rec.instance_index = i;
            rec.algo = algo;
            if (algo == AlgoId::Bair) {
                rec.seed = bair_seed;
                rec.outcome.chosen_arm = phase2.survivor;
                rec.outcome.total_steps = phase2.steps;
                rec.outcome.total_rejections = phase2.rejections;
                rec.outcome.per_arm_accepts = bair_session.arm_accepts();
                rec.outcome.termination = Termination::Identified;
                rec.outcome.phase_boundary = 0;
            } else {
                const std::uint64_t seed = derive_seed(
                    cell.master_seed, static_cast<std::uint64_t>(i), 0,
                    static_cast<std::uint64_t>(algo));
                UserSession session(instance, params, seed, prepared);
                RngStream policy_rng(derive_seed(seed, stream_tag::kPolicy));
                switch (algo) {
                    case AlgoId::Uni:
                        rec.outcome = uniform_explore(session, budget, policy_rng);
                        break;
                    case AlgoId::Exp3: {
                        // The prepared-user budget can dip below the
                        // algorithm's own applicability bound; floor it.
                        const auto t_min = static_cast<std::int64_t>(
                            std::floor(cell.k * std::log(static_cast<double>(cell.k)))) + 1;
                        rec.outcome = exp3(session, std::max(budget, t_min), policy_rng);
                        break;
                    }
                    case AlgoId::TrackStop: {
                        TrackStopOptions opt;
                        opt.t_max = cell.ts_t_max();
                        rec.outcome = track_and_stop(session, cell.delta, opt);
                        break;
                    }
                    default: break;
                }
                rec.seed = seed;
            }
            rec.success = rec.outcome.chosen_arm == instance.best_arm();
            by_algo[ai][static_cast<std::size_t>(i)] = std::move(rec);
        }
    });

    CellResult result;
    result.cell = cell;
    for (std::size_t ai = 0; ai < cell.algos.size(); ++ai) {
        result.summaries.push_back(summarize(cell.algos[ai], cell.delta, by_algo[ai]));
    }
    result.records = std::move(by_algo);
    return result;
}

EmitFormat emit_format_from_name(const std::string& name) {
    if (name == "csv") return EmitFormat::Csv;
    if (name == "json") return EmitFormat::Json;
    throw std::invalid_argument("UnsupportedFormat: '" + name + "' (valid: csv, json)");
}

namespace {
std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
}  // namespace

std::string emit_results(const std::vector<CellResult>& results, EmitFormat format) {
    std::size_t rows = 0;
    for (const auto& r : results) rows += r.summaries.size();
    if (rows == 0) throw std::invalid_argument("EmptyInput: no summaries to emit");

    if (format == EmitFormat::Json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : results) {
            for (const auto& s : r.summaries) {
                arr.push_back({{"delta", r.cell.delta},
                               {"K", r.cell.k},
                               {"gap", r.cell.gap},
                               {"alpha", r.cell.alpha},
                               {"noise_p", r.cell.noise_p},
                               {"algo", algo_name(s.algo)},
                               {"reps", s.reps},
                               {"success_rate", std::stod(fmt6(s.success_rate))},
                               {"failure_ratio", std::stod(fmt6(s.failure_ratio))},
                               {"mean_stop_time", std::stod(fmt6(s.mean_stop_time))},
                               {"stop_time_se", std::stod(fmt6(s.stop_time_se))},
                               {"mean_rejection_rate", std::stod(fmt6(s.mean_rejection_rate))}});
            }
        }
        return nlohmann::json{{"results", arr}}.dump(2) + "\n";
    }

    std::string out =
        "delta,K,gap,alpha,noise_p,algo,reps,success_rate,failure_ratio,mean_stop_time,"
        "stop_time_se,mean_rejection_rate\n";
    for (const auto& r : results) {
        for (const auto& s : r.summaries) {
            out += fmt6(r.cell.delta) + "," + std::to_string(r.cell.k) + "," + fmt6(r.cell.gap) +
                   "," + fmt6(r.cell.alpha) + "," + fmt6(r.cell.noise_p) + "," +
                   algo_name(s.algo) + "," + std::to_string(s.reps) + "," + fmt6(s.success_rate) +
                   "," + fmt6(s.failure_ratio) + "," + fmt6(s.mean_stop_time) + "," +
                   fmt6(s.stop_time_se) + "," + fmt6(s.mean_rejection_rate) + "\n";
        }
    }
    return out;
}

std::vector<ExperimentCell> cells_from_json(const nlohmann::json& config) {
    if (!config.contains("cells") || !config.at("cells").is_array())
        throw std::invalid_argument("InvalidConfig: expected a top-level 'cells' array");
    std::vector<ExperimentCell> cells;
    for (const auto& j : config.at("cells")) {
        ExperimentCell cell;
        cell.delta = j.at("delta").get<double>();
        cell.k = j.at("k").get<int>();
        if (j.contains("gap")) cell.gap = j.at("gap").get<double>();
        if (j.contains("alpha")) cell.alpha = j.at("alpha").get<double>();
        if (j.contains("rho")) {
            const auto& rho = j.at("rho");
            const auto kind = rho.at("kind").get<std::string>();
            if (kind == "constant")
                cell.rho = RhoPolicy::constant(rho.at("value").get<double>());
            else if (kind == "linear_acceptance")
                cell.rho = RhoPolicy::linear_acceptance();
            else
                throw std::invalid_argument("InvalidConfig: rho kind '" + kind +
                                            "' (valid: constant, linear_acceptance)");
        }
        if (j.contains("noise_p")) cell.noise_p = j.at("noise_p").get<double>();
        if (j.contains("algos")) {
            cell.algos.clear();
            for (const auto& a : j.at("algos")) cell.algos.push_back(algo_from_name(a.get<std::string>()));
        }
        if (j.contains("reps")) cell.replications = j.at("reps").get<int>();
        if (j.contains("seed")) cell.master_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n1")) cell.n1_override = j.at("n1").get<std::int64_t>();
        if (j.contains("m")) cell.m_override = j.at("m").get<int>();
        if (!(cell.delta > 0.0 && cell.delta < 1.0))
            throw std::invalid_argument("InvalidDelta: delta must be in (0, 1)");
        cells.push_back(cell);
    }
    return cells;
}

nlohmann::json cell_to_json(const ExperimentCell& cell) {
    nlohmann::json rho;
    if (cell.rho.kind == RhoPolicy::Kind::Constant)
        rho = {{"kind", "constant"}, {"value", cell.rho.value}};
    else
        rho = {{"kind", "linear_acceptance"}};
    nlohmann::json j{{"delta", cell.delta}, {"k", cell.k},
                     {"gap", cell.gap},     {"alpha", cell.alpha},
                     {"rho", rho},          {"noise_p", cell.noise_p},
                     {"reps", cell.replications}, {"seed", cell.master_seed}};
    nlohmann::json algos = nlohmann::json::array();
    for (auto a : cell.algos) algos.push_back(algo_name(a));
    j["algos"] = algos;
    if (cell.n1_override) j["n1"] = *cell.n1_override;
    if (cell.m_override) j["m"] = *cell.m_override;
    return j;
}

}  // namespace bair
