#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "sparse_rank/error.hpp"
#include "sparse_rank/harness.hpp"
#include "sparse_rank/threshold.hpp"

using namespace sparse_rank;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::BadInput;
}

std::string csv_of(const ExperimentConfig& cfg, bool timing = false) {
    std::ostringstream out;
    write_csv(out, cfg, run_experiment(cfg), timing);
    return out.str();
}

const char* kPoissonConfig = R"({
  "q": 3,
  "ddist": {"kind": "poisson", "mean": 2.5},
  "kdist": {"kind": "fixed", "value": 3},
  "experiment": "fullrank",
  "n_values": [100, 200],
  "trials": 6,
  "seed": 42
})";

}  // namespace

TEST_CASE("wilson interval") {
    const auto ci = wilson_interval(8, 10);
    CHECK(ci.lo == doctest::Approx(0.4902).epsilon(1e-3));
    CHECK(ci.hi == doctest::Approx(0.9433).epsilon(1e-3));
    const auto none = wilson_interval(0, 20);
    CHECK(none.lo == 0.0);
    CHECK(none.hi > 0.0);
    const auto all = wilson_interval(20, 20);
    CHECK(all.hi == 1.0);
    CHECK(all.lo < 1.0);
}

TEST_CASE("trial seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (int n : {100, 200, 1000}) {
        for (int t = 0; t < 500; ++t) seen.insert(trial_seed(7, n, t));
    }
    CHECK(seen.size() == 1500);
    CHECK(trial_seed(7, 100, 3) != trial_seed(8, 100, 3));
}

TEST_CASE("config parsing") {
    const auto cfg = parse_config(kPoissonConfig);
    CHECK(cfg.spec.q() == 3);
    CHECK(cfg.trials == 6);
    CHECK(cfg.n_values == std::vector<int>{100, 200});
    CHECK(cfg.seed == 42);
    CHECK(cfg.spec.chi().size() == 2);

    const auto model = parse_model(R"({"q": 4, "ddist": {"kind": "table", "atoms": [[3, 0.5], [4, 0.5]]},
        "kdist": {"kind": "powerlaw", "alpha": 3.5, "kmin": 3}, "chi": "one"})");
    CHECK(model.q() == 4);
    CHECK(model.chi().size() == 1);
    CHECK(model.kdist().min_value() == 3);

    const auto custom = parse_model(R"({"q": 3, "ddist": {"kind": "fixed", "value": 3},
        "kdist": {"kind": "fixed", "value": 3}, "chi": [[1, 0.25], [2, 0.75]]})");
    CHECK(custom.chi()[1].second == 0.75);

    for (const char* bad : {
             "not json",
             R"({"q": 6, "ddist": {"kind": "fixed", "value": 3}, "kdist": {"kind": "fixed", "value": 3}, "n_values": [10]})",
             R"({"q": 2, "ddist": {"kind": "fixed", "value": 3}, "kdist": {"kind": "fixed", "value": 2}, "n_values": [10]})",
             R"({"q": 2, "ddist": {"kind": "gamma"}, "kdist": {"kind": "fixed", "value": 3}, "n_values": [10]})",
             R"({"q": 2, "ddist": {"kind": "fixed", "value": 3}, "kdist": {"kind": "fixed", "value": 3}})",
             R"({"q": 2, "ddist": {"kind": "fixed", "value": 3}, "kdist": {"kind": "fixed", "value": 3}, "n_values": [10], "trials": 0})",
             R"({"q": 2, "ddist": {"kind": "fixed", "value": 3}, "kdist": {"kind": "fixed", "value": 3}, "n_values": [10], "model": "tree"})",
             R"({"q": 2, "ddist": {"kind": "fixed", "value": 3}, "kdist": {"kind": "fixed", "value": 3}, "n_values": [10], "experiment": "nullity", "delta": 0.5})",
             R"({"q": 2, "ddist": {"kind": "fixed", "value": 3}, "kdist": {"kind": "fixed", "value": 3}, "n_values": [10], "require_divisible": true})",
             R"({"q": 2, "ddist": {"kind": "poisson", "mean": -1}, "kdist": {"kind": "fixed", "value": 3}, "n_values": [10]})",
         }) {
        CAPTURE(bad);
        CHECK(code_of([&] { (void)parse_config(bad); }) == ErrorCode::BadConfig);
    }
}

TEST_CASE("experiments are reproducible") {
    auto cfg = parse_config(kPoissonConfig);
    const std::string first = csv_of(cfg);
    CHECK(first == csv_of(cfg));
    cfg.jobs = 3;
    CHECK(first == csv_of(cfg));
    cfg.seed = 43;
    CHECK(first != csv_of(cfg));
    CHECK(first.rfind("# sparse-rank v1, seed=42\n", 0) == 0);
    CHECK(first.find("wall_ms") == std::string::npos);
    cfg.seed = 42;
    CHECK(csv_of(cfg, true).find("wall_ms") != std::string::npos);
}

TEST_CASE("summaries follow from the trial records") {
    auto cfg = parse_config(kPoissonConfig);
    cfg.experiment = Experiment::RankFormula;
    const auto r = run_experiment(cfg);
    REQUIRE(r.trials.size() == 12);
    REQUIRE(r.summaries.size() == 2);
    for (const auto& s : r.summaries) {
        double sum = 0.0;
        int full = 0;
        for (const auto& t : r.trials) {
            if (t.n != s.n) continue;
            CHECK(t.completed());
            CHECK(t.rank + t.nullity == t.n);
            CHECK(t.rank <= t.m);
            CHECK(t.full_row_rank == (t.rank == t.m));
            sum += static_cast<double>(t.rank) / t.n;
            full += t.full_row_rank;
        }
        CHECK(s.completed == 6);
        CHECK(s.full_count == full);
        CHECK(std::abs(s.mean_rank_over_n - sum / 6) < 1e-12);
        CHECK(std::abs(s.predicted - normalized_rank(cfg.spec)) < 1e-15);
        CHECK(s.rate_ci.lo <= s.rate());
        CHECK(s.rate() <= s.rate_ci.hi);
    }
    CHECK_FALSE(r.any_n_without_data());
}

TEST_CASE("nullity experiment") {
    auto cfg = parse_config(kPoissonConfig);
    cfg.experiment = Experiment::NullityTernary;
    cfg.delta = 0.05;
    const auto r = run_experiment(cfg);
    for (const auto& t : r.trials) {
        CHECK(t.rows_added == static_cast<int>(std::floor(0.05 * t.n)));
        CHECK(t.max_nullity_drop <= 1);
        CHECK(t.nullity - t.nullity_after <= t.rows_added);
        CHECK(t.nullity_after <= t.nullity);
    }
    auto failing = parse_config(R"({"q": 2, "ddist": {"kind": "poisson", "mean": 2.9},
        "kdist": {"kind": "fixed", "value": 3}, "n_values": [50], "experiment": "nullity", "delta": 0.02})");
    CHECK(code_of([&] { (void)run_experiment(failing); }) == ErrorCode::BadConfig);
}

TEST_CASE("exhausted retries are recorded") {
    auto cfg = parse_config(R"({"q": 2, "ddist": {"kind": "fixed", "value": 1},
        "kdist": {"kind": "fixed", "value": 3}, "n_values": [10], "trials": 2, "degree_tries": 3})");
    const auto r = run_experiment(cfg);
    CHECK(r.trials.size() == 2);
    for (const auto& t : r.trials) CHECK(t.error == "retries_exhausted");
    CHECK(r.summaries[0].skipped == 2);
    CHECK(r.any_n_without_data());
}

TEST_CASE("phi curve") {
    ExperimentConfig cfg(parse_model(R"({"q": 2, "ddist": {"kind": "table", "atoms": [[3, 0.5], [4, 0.5]]},
        "kdist": {"kind": "table", "atoms": [[3, 0.5], [4, 0.5]]}})"));
    cfg.experiment = Experiment::PhiCurve;
    cfg.curve_points = 11;
    const auto r = run_experiment(cfg);
    REQUIRE(r.curve.size() == 11);
    CHECK(r.curve.front().z == 0.0);
    CHECK(r.curve.back().z == 1.0);
    CHECK(std::abs(r.curve.front().phi) < 1e-12);
    CHECK(std::abs(r.curve.back().phi) < 1e-12);
    std::ostringstream out;
    write_csv(out, cfg, r);
    CHECK(out.str().find("z,phi\n") != std::string::npos);
}
