// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any fails. Optional argument: path to the sparse-rank executable, used to
// compare two CLI runs byte for byte.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "sparse_rank/error.hpp"
#include "sparse_rank/harness.hpp"
#include "sparse_rank/lattice.hpp"
#include "sparse_rank/linalg.hpp"
#include "sparse_rank/matgen.hpp"
#include "sparse_rank/threshold.hpp"

using namespace sparse_rank;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    fmt::print("{} {:>2} {} [{}] ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail, seconds_since(t0));
    std::fflush(stdout);
}

ModelSpec spec_of(DegreeDist d, DegreeDist k, int q) {
    return ModelSpec::uniform_chi(std::move(d), std::move(k), Field::make(q));
}

bool is_prime_power(int q) {
    int p = 2;
    while (q % p != 0) ++p;
    while (q % p == 0) q /= p;
    return q == 1;
}

Outcome xorsat() {
    const auto t0 = Clock::now();
    const double t = xorsat_threshold(3);
    const double secs = seconds_since(t0);
    return {t >= 2.74 && t <= 2.76 && secs < 5.0, fmt::format("threshold={:.6f} time={:.3f}s", t, secs)};
}

DegreeDist random_dist(Rng& rng, int min_value) {
    switch (rng.below(3)) {
        case 0: {
            std::vector<std::pair<int, double>> atoms;
            const int count = 1 + static_cast<int>(rng.below(4));
            double total = 0.0;
            for (int i = 0; i < count; ++i) {
                const double w = 0.1 + rng.uniform01();
                atoms.emplace_back(min_value + static_cast<int>(rng.below(8)) + 8 * i, w);
                total += w;
            }
            for (auto& a : atoms) a.second /= total;
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < atoms.size(); ++i) s += atoms[i].second;
            atoms.back().second = 1.0 - s;
            return DegreeDist::table(atoms);
        }
        case 1:
            if (min_value == 0) return DegreeDist::poisson(0.5 + 6.0 * rng.uniform01());
            return DegreeDist::fixed(min_value + static_cast<int>(rng.below(6)));
        default: return DegreeDist::powerlaw(3.1 + 2.0 * rng.uniform01(), std::max(1, min_value));
    }
}

Outcome phi_anchors() {
    Rng rng(2024);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto d = random_dist(rng, static_cast<int>(rng.below(3)));
        const auto k = random_dist(rng, 3 + static_cast<int>(rng.below(3)));
        const PhiFunction f(d, k);
        worst = std::max(worst, std::abs(f(0.0) - (1.0 - d.mean() / k.mean())));
    }
    const auto two = DegreeDist::table({{3, 0.5}, {4, 0.5}});
    const auto ex = spec_of(two, two, 2);
    const double p0 = phi(ex, 0.0), p1 = phi(ex, 1.0);
    const auto r = condition_check(ex);
    const bool ok = worst <= 1e-12 && std::abs(p0) <= 1e-9 && std::abs(p1) <= 1e-9 && !r.holds && r.boundary_case;
    return {ok, fmt::format("max|Phi(0)-(1-d/k)|={:.2e} Phi(0)={:.1e} Phi(1)={:.1e} holds={} boundary={}", worst, p0, p1,
                            r.holds, r.boundary_case)};
}

Outcome classification() {
    const auto below = condition_check(spec_of(DegreeDist::fixed(3), DegreeDist::fixed(4), 2));
    const auto equal = condition_check(spec_of(DegreeDist::fixed(4), DegreeDist::fixed(4), 3));
    const auto power = condition_check(spec_of(DegreeDist::powerlaw(3.5, 1), DegreeDist::fixed(3), 2));
    const auto even = condition_check(ModelSpec::unit_chi(DegreeDist::fixed(4), DegreeDist::fixed(8), Field::make(2)));
    const bool ok = below.holds && !equal.holds && equal.boundary_case && power.holds && !even.holds && !even.coprime;
    return {ok, fmt::format("fixed3/4 holds={} fixed4/4 holds={} boundary={} power holds={} zero-row-sums holds={} "
                            "coprime={}",
                            below.holds, equal.holds, equal.boundary_case, power.holds, even.holds, even.coprime)};
}

Outcome determinants() {
    const auto t0 = Clock::now();
    int checked = 0;
    std::string bad;
    for (int q = 2; q <= 64; ++q) {
        if (!is_prime_power(q)) continue;
        const auto b = basis_identical(*Field::make(q));
        if (b.m_q.det_abs != q || b.a_q.det_abs != q) bad += fmt::format(" q={}", q);
        ++checked;
    }
    const long long printed[6][6] = {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 1}, {0, 0, 1, 0, 1, 0},
                                     {0, 0, 1, 2, 0, 0}, {0, 1, 0, 0, 1, 0}, {1, 0, 0, 1, 1, 2}};
    const auto a7 = basis_identical(*Field::make(7)).a_q;
    bool a7_ok = true;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) a7_ok = a7_ok && a7.vectors[j][i] == printed[i][j];
    }
    const double secs = seconds_since(t0);
    return {bad.empty() && a7_ok && secs < 10.0,
            fmt::format("{} prime powers, mismatches:{} A7 match={} time={:.2f}s", checked, bad.empty() ? " none" : bad,
                        a7_ok, secs)};
}

// Multisets of unit codes in non-decreasing order, kept when they are the
// smallest sorted representative of their scaling class.
std::vector<std::vector<Elem>> multisets_up_to_scaling(const Field& f, int k0) {
    std::vector<std::vector<Elem>> out;
    std::vector<int> c(static_cast<std::size_t>(k0), 1);
    const int q = f.q();
    while (true) {
        std::vector<Elem> ms;
        for (int v : c) ms.push_back(Elem{static_cast<std::uint16_t>(v)});
        bool canonical = true;
        for (int s = 2; s < q && canonical; ++s) {
            std::vector<Elem> scaled;
            for (Elem e : ms) scaled.push_back(f.mul(Elem{static_cast<std::uint16_t>(s)}, e));
            std::sort(scaled.begin(), scaled.end());
            canonical = !(scaled < ms);
        }
        if (canonical) out.push_back(ms);
        int i = k0 - 1;
        while (i >= 0 && c[i] == q - 1) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k0; ++j) c[j] = c[i];
    }
    return out;
}

Outcome module_oracle() {
    const auto t0 = Clock::now();
    int total = 0;
    std::string bad;
    for (int q : {2, 3, 4, 5, 7, 8, 9}) {
        const auto field = Field::make(q);
        for (int k0 : {3, 4, 5}) {
            for (const auto& coeffs : multisets_up_to_scaling(*field, k0)) {
                ++total;
                const bool identical = std::all_of(coeffs.begin(), coeffs.end(), [&](Elem e) { return e == coeffs[0]; });
                const LatticeBasis basis = identical ? basis_identical(*field).a_q : basis_general(*field, coeffs).basis;
                const auto r = verify_basis(field, coeffs, basis);
                const long long expected = identical ? q : 1;
                if (!r.ok() || r.det_abs != expected) {
                    std::string s;
                    for (Elem e : coeffs) s += fmt::format("{}.", e.v);
                    bad += fmt::format(" q={}:{}", q, s);
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    return {bad.empty() && secs < 300.0,
            fmt::format("{} multisets, failures:{} time={:.1f}s", total, bad.empty() ? " none" : bad, secs)};
}

Outcome divisibility() {
    std::string detail;
    bool ok = true;
    for (int q : {3, 5, 7}) {
        const auto f = Field::make(q);
        const auto basis = basis_identical(*f).a_q;
        for (int fd : {2, 4}) {
            const auto r = intersect_divisible(*f, basis, fd);
            ok = ok && r.holds;
            detail += fmt::format("q={},f={}:{}/{} ", q, fd, r.holds ? "ok" : "violated", r.points_checked);
        }
    }
    return {ok, detail.substr(0, detail.size() - 1)};
}

ExperimentConfig experiment(ModelSpec spec, Experiment e, int n, int trials, std::uint64_t seed) {
    ExperimentConfig cfg(std::move(spec));
    cfg.experiment = e;
    cfg.n_values = {n};
    cfg.trials = trials;
    cfg.seed = seed;
    return cfg;
}

Outcome rank_formula() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (const auto& [label, spec] :
         {std::pair{"fixed3/8", spec_of(DegreeDist::fixed(3), DegreeDist::fixed(8), 2)},
          std::pair{"poisson2.9/3", spec_of(DegreeDist::poisson(2.9), DegreeDist::fixed(3), 2)}}) {
        const auto r = run_experiment(experiment(spec, Experiment::RankFormula, 2000, 100, 7));
        const auto& s = r.summaries.at(0);
        ok = ok && s.completed == 100 && s.deviation <= 0.01;
        detail += fmt::format("{}: mean={:.4f} predicted={:.4f} dev={:.4f} completed={}; ", label, s.mean_rank_over_n,
                              s.predicted, s.deviation, s.completed);
    }
    const double secs = seconds_since(t0);
    return {ok && secs < 600.0, detail + fmt::format("time={:.1f}s", secs)};
}

Outcome phase_transition() {
    const auto below = run_experiment(
        experiment(spec_of(DegreeDist::poisson(2.5), DegreeDist::fixed(3), 2), Experiment::FullRank, 1000, 200, 8));
    const auto above = run_experiment(
        experiment(spec_of(DegreeDist::poisson(2.9), DegreeDist::fixed(3), 2), Experiment::FullRank, 1000, 200, 9));
    const auto& lo = below.summaries.at(0);
    const auto& hi = above.summaries.at(0);

    // rows over GF(2) with unit coefficients and even check degree sum to zero
    const auto zero_sum = ModelSpec::unit_chi(DegreeDist::fixed(4), DegreeDist::fixed(8), Field::make(2));
    int samples = 0, full = 0, identity_holds = 0;
    for (int t = 0; t < 200; ++t) {
        Rng rng(trial_seed(10, 1000, t));
        const auto degs = sample_degrees(zero_sum, 1000, rng);
        const auto a = gen_simple(zero_sum, degs, rng);
        std::vector<std::uint16_t> col_sum(static_cast<std::size_t>(a.ncols), 0);
        for (const auto& row : a.rows) {
            for (const auto& e : row) col_sum[e.col] ^= e.coef.v;
        }
        identity_holds += std::all_of(col_sum.begin(), col_sum.end(), [](std::uint16_t v) { return v == 0; });
        full += rank(a) == a.nrows;
        ++samples;
    }
    const bool ok = lo.completed == 200 && hi.completed == 200 && lo.rate() >= 0.9 && hi.rate() <= 0.1 && full == 0 &&
                    identity_holds == samples;
    return {ok, fmt::format("d=2.5 rate={:.3f} d=2.9 rate={:.3f} zero-row-sums rate={}/{} identity={}/{}", lo.rate(),
                            hi.rate(), full, samples, identity_holds, samples)};
}

Outcome ternary() {
    const auto spec = spec_of(DegreeDist::poisson(2.5), DegreeDist::fixed(3), 2);
    auto cfg = experiment(spec, Experiment::NullityTernary, 2000, 50, 11);
    cfg.delta = 0.02;
    const auto r = run_experiment(cfg);
    const auto& s = r.summaries.at(0);
    const double bound = 1.0 - spec.ddist().mean() / spec.kdist().mean() - 0.02 + 0.01;
    int worst_drop = 0;
    for (const auto& t : r.trials) worst_drop = std::max(worst_drop, t.max_nullity_drop);
    const bool ok = s.completed == 50 && s.mean_nullity_after_over_n <= bound && worst_drop <= 1;
    return {ok, fmt::format("mean nullity/n={:.4f} bound={:.4f} max drop per row={} trials={}",
                            s.mean_nullity_after_over_n, bound, worst_drop, s.completed)};
}

Outcome exhaustive() {
    Rng rng(12);
    int agree = 0, total = 0;
    for (int t = 0; t < 200; ++t) {
        const int q = t % 2 == 0 ? 2 : 3;
        const auto f = Field::make(q);
        const int n = 1 + static_cast<int>(rng.below(q == 2 ? 12 : 10));
        SparseMatrix a;
        if (t % 4 < 2) {
            const int m = static_cast<int>(rng.below(n + 3));
            a = SparseMatrix{m, n, std::vector<std::vector<Entry>>(static_cast<std::size_t>(m)), f};
            const double density = 0.1 + 0.4 * rng.uniform01();
            for (auto& row : a.rows) {
                for (int j = 0; j < n; ++j) {
                    if (rng.uniform01() < density) row.push_back({j, Elem{static_cast<std::uint16_t>(1 + rng.below(q - 1))}});
                }
            }
        } else {
            // sparse model matrices from the pairing model
            const auto spec = spec_of(DegreeDist::poisson(2.0 + rng.uniform01()), DegreeDist::fixed(3), q);
            const auto degs = sample_degrees(spec, n, rng, 100000);
            a = gen_pairing(spec, degs, rng);
        }
        const auto expected = oracle::enumerate_kernel(a);
        const auto k = kernel(a);
        const int r = rank(a);
        ++total;
        agree += oracle::ipow(q, k.nullity) == expected.size && k.frozen == expected.frozen && r + k.nullity == n;
    }
    return {agree == total, fmt::format("{}/{} matrices agree", agree, total)};
}

std::string read_all(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism(const std::string& cli) {
    auto cfg = experiment(spec_of(DegreeDist::poisson(2.7), DegreeDist::fixed(3), 3), Experiment::RankFormula, 300, 8, 5);
    std::ostringstream a, b;
    write_csv(a, cfg, run_experiment(cfg), false);
    cfg.jobs = 2;
    write_csv(b, cfg, run_experiment(cfg), false);
    bool ok = a.str() == b.str();
    std::string detail = fmt::format("library runs identical={}", ok);
    if (!cli.empty()) {
        const auto dir = std::filesystem::temp_directory_path() / fmt::format("sparse-rank-acc-{}", ::getpid());
        std::filesystem::create_directories(dir);
        {
            std::ofstream c(dir / "cfg.json");
            c << R"({"q": 2, "ddist": {"kind": "poisson", "mean": 2.6}, "kdist": {"kind": "fixed", "value": 3},
                   "n_values": [200, 400], "trials": 5, "seed": 99})";
        }
        bool cli_ok = true;
        for (const char* sub : {"fullrank", "rankformula", "nullity"}) {
            std::string outs[2];
            for (int run = 0; run < 2; ++run) {
                const auto out = dir / fmt::format("{}-{}.csv", sub, run);
                const std::string cmd = fmt::format("\"{}\" mc {} --config \"{}\" --jobs {} --no-timing --out \"{}\"", cli,
                                                    sub, (dir / "cfg.json").string(), run + 1, out.string());
                cli_ok = cli_ok && std::system(cmd.c_str()) == 0;
                outs[run] = read_all(out);
            }
            cli_ok = cli_ok && !outs[0].empty() && outs[0] == outs[1];
        }
        std::filesystem::remove_all(dir);
        ok = ok && cli_ok;
        detail += fmt::format(" cli runs identical={}", cli_ok);
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    report(1, "xorsat threshold", xorsat);
    report(2, "phi anchors", phi_anchors);
    report(3, "condition classification", classification);
    report(4, "lattice determinants", determinants);
    report(5, "module oracle", module_oracle);
    report(6, "divisibility intersection", divisibility);
    report(7, "rank formula", rank_formula);
    report(8, "phase transition", phase_transition);
    report(9, "ternary augmentation", ternary);
    report(10, "exhaustive small cases", exhaustive);
    report(11, "determinism", [&] { return determinism(cli); });
    fmt::print("{} of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
