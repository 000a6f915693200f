#include "sparse_rank/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "sparse_rank/error.hpp"
#include "sparse_rank/linalg.hpp"
#include "sparse_rank/matgen.hpp"
#include "sparse_rank/threshold.hpp"

namespace sparse_rank {

using nlohmann::json;

namespace {

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::BadConfig, what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad_config(std::string("field '") + key + "': " + e.what());
    }
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) bad_config(std::string("missing field '") + key + "'");
    return get_or<T>(j, key, T{});
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        bad_config(std::string("invalid JSON: ") + e.what());
    }
}

DegreeDist parse_dist(const json& j, const char* role) {
    if (!j.is_object()) bad_config(std::string(role) + " must be an object");
    const auto kind = require<std::string>(j, "kind");
    const double tol = get_or<double>(j, "tol", 1e-12);
    try {
        if (kind == "fixed") return DegreeDist::fixed(require<int>(j, "value"));
        if (kind == "poisson") return DegreeDist::poisson(require<double>(j, "mean"), tol);
        if (kind == "powerlaw") return DegreeDist::powerlaw(require<double>(j, "alpha"), require<int>(j, "kmin"), tol);
        if (kind == "table") {
            return DegreeDist::table(require<std::vector<std::pair<int, double>>>(j, "atoms"));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadConfig) throw;
        bad_config(std::string(role) + ": " + e.what());
    }
    bad_config(std::string(role) + ": unknown kind '" + kind + "'");
}

ModelSpec model_from(const json& j) {
    const int q = get_or<int>(j, "q", 2);
    FieldPtr field;
    try {
        field = Field::make(q);
    } catch (const Error& e) {
        bad_config(e.what());
    }
    if (!j.contains("ddist") || !j.contains("kdist")) bad_config("missing 'ddist' or 'kdist'");
    DegreeDist ddist = parse_dist(j.at("ddist"), "ddist");
    DegreeDist kdist = parse_dist(j.at("kdist"), "kdist");
    try {
        if (!j.contains("chi") || j.at("chi") == "uniform") {
            return ModelSpec::uniform_chi(std::move(ddist), std::move(kdist), field);
        }
        if (j.at("chi") == "one") return ModelSpec::unit_chi(std::move(ddist), std::move(kdist), field);
        std::vector<std::pair<Elem, double>> chi;
        for (const auto& [code, prob] : require<std::vector<std::pair<int, double>>>(j, "chi")) {
            if (code < 0 || code >= q) bad_config("chi: element code out of range");
            chi.emplace_back(Elem{static_cast<std::uint16_t>(code)}, prob);
        }
        return ModelSpec(std::move(ddist), std::move(kdist), field, std::move(chi));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::BadConfig) throw;
        bad_config(e.what());
    }
}

Experiment parse_experiment(const std::string& name) {
    if (name == "fullrank") return Experiment::FullRank;
    if (name == "rankformula") return Experiment::RankFormula;
    if (name == "nullity_ternary" || name == "nullity") return Experiment::NullityTernary;
    if (name == "phi_curve") return Experiment::PhiCurve;
    bad_config("unknown experiment '" + name + "'");
}

SparseMatrix generate(const ExperimentConfig& cfg, int n, Rng& rng, DegreeSequencePair& degs) {
    degs = sample_degrees(cfg.spec, n, rng, cfg.degree_tries, cfg.require_divisible);
    if (cfg.model == GraphModel::Pairing) return gen_pairing(cfg.spec, degs, rng);
    return gen_simple(cfg.spec, degs, rng, cfg.graph_tries);
}

TrialRecord run_trial(const ExperimentConfig& cfg, int n, int trial) {
    TrialRecord rec;
    rec.n = n;
    rec.trial = trial;
    rec.seed_used = trial_seed(cfg.seed, n, trial);
    const auto start = std::chrono::steady_clock::now();
    try {
        Rng rng(rec.seed_used);
        DegreeSequencePair degs;
        const SparseMatrix a = generate(cfg, n, rng, degs);
        rec.m = a.nrows;
        IncrementalEchelon ech(a.field, a.ncols);
        for (const auto& row : a.rows) ech.add_row(row);
        rec.rank = ech.rank();
        rec.nullity = ech.nullity();
        rec.full_row_rank = rec.rank == rec.m;
        if (cfg.experiment == Experiment::NullityTernary) {
            const int t = static_cast<int>(std::floor(cfg.delta * n));
            const SparseMatrix aug = add_ternary_rows(a, t, rng, cfg.spec);
            int previous = ech.nullity();
            for (int r = a.nrows; r < aug.nrows; ++r) {
                ech.add_row(aug.rows[r]);
                rec.max_nullity_drop = std::max(rec.max_nullity_drop, previous - ech.nullity());
                previous = ech.nullity();
            }
            rec.rows_added = t;
            rec.nullity_after = ech.nullity();
        }
        rec.frozen_count = static_cast<int>(ech.frozen().size());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RetriesExhausted) throw;
        rec.error = "retries_exhausted";
    }
    rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
    std::vector<std::pair<int, int>> tasks;
    for (int n : cfg.n_values) {
        for (int t = 0; t < cfg.trials; ++t) tasks.emplace_back(n, t);
    }
    std::vector<TrialRecord> out(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                out[i] = run_trial(cfg, tasks[i].first, tasks[i].second);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    std::sort(out.begin(), out.end(),
              [](const TrialRecord& a, const TrialRecord& b) { return std::tie(a.n, a.trial) < std::tie(b.n, b.trial); });
    return out;
}

std::string dist_label(const DegreeDist& d) {
    std::string s;
    for (const Atom& a : d.atoms()) {
        if (!s.empty()) s += ";";
        s += fmt::format("{}:{:.6g}", a.value, a.prob);
        if (s.size() > 60) return s + ";...";
    }
    return s;
}

}  // namespace

ModelSpec parse_model(const std::string& json_text) { return model_from(parse_json(json_text)); }

ExperimentConfig parse_config(const std::string& json_text) {
    const json j = parse_json(json_text);
    if (!j.is_object()) bad_config("config must be a JSON object");
    ExperimentConfig cfg{model_from(j)};
    cfg.experiment = parse_experiment(get_or<std::string>(j, "experiment", "fullrank"));
    const auto model = get_or<std::string>(j, "model", "simple");
    if (model == "simple") {
        cfg.model = GraphModel::Simple;
    } else if (model == "pairing") {
        cfg.model = GraphModel::Pairing;
    } else {
        bad_config("model must be 'simple' or 'pairing'");
    }
    cfg.n_values = get_or<std::vector<int>>(j, "n_values", {});
    cfg.trials = get_or<int>(j, "trials", 1);
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.delta = get_or<double>(j, "delta", 0.0);
    cfg.jobs = get_or<int>(j, "jobs", 1);
    cfg.curve_points = get_or<int>(j, "curve_points", 101);
    cfg.degree_tries = get_or<long long>(j, "degree_tries", 0);
    cfg.graph_tries = get_or<long long>(j, "graph_tries", 1'000'000);
    cfg.require_divisible = get_or<bool>(j, "require_divisible", false);
    cfg.out_path = get_or<std::string>(j, "out", "");

    if (cfg.experiment != Experiment::PhiCurve) {
        if (cfg.n_values.empty()) bad_config("n_values must be non-empty");
        if (cfg.trials < 1) bad_config("trials must be at least 1");
        const int fk = cfg.spec.kdist().gcd_support();
        for (int n : cfg.n_values) {
            if (n < 1) bad_config("n_values must be positive");
            if (cfg.require_divisible && n % fk != 0) {
                bad_config(fmt::format("n = {} is not divisible by gcd supp k = {}", n, fk));
            }
        }
    } else if (cfg.curve_points < 2) {
        bad_config("curve_points must be at least 2");
    }
    if (cfg.experiment == Experiment::NullityTernary && !(cfg.delta >= 0.0 && cfg.delta <= 0.1)) {
        bad_config("delta must lie in [0, 0.1]");
    }
    if (cfg.jobs < 1) bad_config("jobs must be at least 1");
    if (cfg.degree_tries < 0 || cfg.graph_tries < 1) bad_config("retry limits must be positive");
    return cfg;
}

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::FullRank: return "fullrank";
        case Experiment::RankFormula: return "rankformula";
        case Experiment::NullityTernary: return "nullity_ternary";
        case Experiment::PhiCurve: return "phi_curve";
    }
    return "unknown";
}

std::uint64_t trial_seed(std::uint64_t seed, int n, int trial) {
    return seed ^ mix64((static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint32_t>(trial));
}

Interval wilson_interval(long long successes, long long total, double z) {
    if (total <= 0) return {0.0, 1.0};
    const double nn = static_cast<double>(total);
    const double p = successes / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

bool ExperimentResult::any_n_without_data() const noexcept {
    return std::any_of(summaries.begin(), summaries.end(), [](const SummaryRecord& s) { return s.completed == 0; });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ExperimentResult result;
    const ModelSpec& spec = cfg.spec;
    if (cfg.experiment == Experiment::PhiCurve) {
        const PhiFunction phi(spec.ddist(), spec.kdist());
        for (int i = 0; i < cfg.curve_points; ++i) {
            const double z = i == cfg.curve_points - 1 ? 1.0 : static_cast<double>(i) / (cfg.curve_points - 1);
            result.curve.push_back({z, phi(z)});
        }
        return result;
    }
    if (cfg.experiment == Experiment::NullityTernary && !condition_check(spec).holds) {
        bad_config("nullity_ternary needs a model for which the full-rank condition holds");
    }

    double predicted = 0.0;
    if (cfg.experiment == Experiment::RankFormula) predicted = normalized_rank(spec);
    if (cfg.experiment == Experiment::NullityTernary) {
        predicted = 1.0 - spec.ddist().mean() / spec.kdist().mean() - cfg.delta;
    }

    result.trials = run_trials(cfg);
    for (int n : cfg.n_values) {
        if (std::any_of(result.summaries.begin(), result.summaries.end(), [&](const auto& s) { return s.n == n; })) {
            continue;
        }
        SummaryRecord s;
        s.n = n;
        s.predicted = predicted;
        double rank_sum = 0.0, nul_sum = 0.0, nul_after_sum = 0.0;
        for (const TrialRecord& t : result.trials) {
            if (t.n != n) continue;
            if (!t.completed()) {
                ++s.skipped;
                continue;
            }
            ++s.completed;
            s.full_count += t.full_row_rank ? 1 : 0;
            rank_sum += static_cast<double>(t.rank) / n;
            nul_sum += static_cast<double>(t.nullity) / n;
            nul_after_sum += static_cast<double>(t.nullity_after) / n;
        }
        if (s.completed > 0) {
            s.mean_rank_over_n = rank_sum / s.completed;
            s.mean_nullity_over_n = nul_sum / s.completed;
            s.mean_nullity_after_over_n = nul_after_sum / s.completed;
        }
        s.rate_ci = wilson_interval(s.full_count, s.completed);
        if (cfg.experiment == Experiment::RankFormula) s.deviation = std::abs(s.mean_rank_over_n - predicted);
        if (cfg.experiment == Experiment::NullityTernary) s.deviation = s.mean_nullity_after_over_n - predicted;
        result.summaries.push_back(s);
    }
    return result;
}

void write_csv(std::ostream& out, const ExperimentConfig& cfg, const ExperimentResult& result, bool include_timing) {
    const ModelSpec& spec = cfg.spec;
    out << fmt::format("# sparse-rank v1, seed={}\n", cfg.seed);
    out << fmt::format("# experiment={} q={} model={} trials={} delta={} ddist={} kdist={}\n", to_string(cfg.experiment),
                       spec.q(), cfg.model == GraphModel::Simple ? "simple" : "pairing", cfg.trials, cfg.delta,
                       dist_label(spec.ddist()), dist_label(spec.kdist()));
    if (cfg.experiment == Experiment::PhiCurve) {
        out << "z,phi\n";
        for (const CurvePoint& p : result.curve) out << fmt::format("{:.10f},{:.15g}\n", p.z, p.phi);
        return;
    }

    const bool ternary = cfg.experiment == Experiment::NullityTernary;
    out << "n,trial,m,rank,nullity,frozen_count,full_row_rank,seed_used";
    if (ternary) out << ",rows_added,nullity_after,max_nullity_drop";
    if (include_timing) out << ",wall_ms";
    out << ",error\n";
    for (const TrialRecord& t : result.trials) {
        out << fmt::format("{},{},{},{},{},{},{},{}", t.n, t.trial, t.m, t.rank, t.nullity, t.frozen_count,
                           t.full_row_rank ? 1 : 0, t.seed_used);
        if (ternary) out << fmt::format(",{},{},{}", t.rows_added, t.nullity_after, t.max_nullity_drop);
        if (include_timing) out << "," << t.wall_ms;
        out << "," << t.error << "\n";
    }

    out << "# summary\n";
    switch (cfg.experiment) {
        case Experiment::FullRank:
            out << "n,completed,skipped,full_count,rate,wilson_lo,wilson_hi\n";
            for (const SummaryRecord& s : result.summaries) {
                out << fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f}\n", s.n, s.completed, s.skipped, s.full_count,
                                   s.rate(), s.rate_ci.lo, s.rate_ci.hi);
            }
            break;
        case Experiment::RankFormula:
            out << "n,completed,skipped,mean_rank_over_n,predicted,abs_deviation\n";
            for (const SummaryRecord& s : result.summaries) {
                out << fmt::format("{},{},{},{:.8f},{:.8f},{:.8f}\n", s.n, s.completed, s.skipped, s.mean_rank_over_n,
                                   s.predicted, s.deviation);
            }
            break;
        case Experiment::NullityTernary:
            out << "n,completed,skipped,mean_nullity_over_n,mean_nullity_after_over_n,bound,excess_over_bound\n";
            for (const SummaryRecord& s : result.summaries) {
                out << fmt::format("{},{},{},{:.8f},{:.8f},{:.8f},{:.8f}\n", s.n, s.completed, s.skipped,
                                   s.mean_nullity_over_n, s.mean_nullity_after_over_n, s.predicted, s.deviation);
            }
            break;
        case Experiment::PhiCurve:
            break;
    }
}

}  // namespace sparse_rank
