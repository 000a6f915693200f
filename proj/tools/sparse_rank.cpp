#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sparse_rank/error.hpp"
#include "sparse_rank/harness.hpp"
#include "sparse_rank/lattice.hpp"
#include "sparse_rank/linalg.hpp"
#include "sparse_rank/matgen.hpp"
#include "sparse_rank/threshold.hpp"

using namespace sparse_rank;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::BadConfig, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes to path, or stdout when path is empty.
template <class F>
void with_output(const std::string& path, F&& body) {
    if (path.empty()) {
        body(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::BadConfig, "cannot write " + path);
    body(out);
}

std::vector<Elem> parse_coeffs(const std::vector<int>& codes, const Field& f) {
    std::vector<Elem> out;
    for (int c : codes) {
        if (c <= 0 || c >= f.q()) throw Error(ErrorCode::BadParameter, "coefficient code " + std::to_string(c) + " is not a unit");
        out.push_back(Elem{static_cast<std::uint16_t>(c)});
    }
    return out;
}

json to_json(const LatticeBasis& b) { return {{"det_abs", b.det_abs}, {"vectors", b.vectors}}; }

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::RetriesExhausted: return 3;
        case ErrorCode::BadConfig:
        case ErrorCode::BadParameter:
        case ErrorCode::BadInput:
        case ErrorCode::NotPrimePower:
        case ErrorCode::Unsupported:
        case ErrorCode::NotCoprime:
        case ErrorCode::LengthMismatch:
        case ErrorCode::OutOfDomain: return 2;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank of sparse random matrices over finite fields"};
    app.require_subcommand(1);

    // threshold
    auto* threshold = app.add_subcommand("threshold", "Threshold functional and full-rank condition");
    threshold->require_subcommand(1);
    std::string config_path;
    auto* check = threshold->add_subcommand("check", "Decide the full-rank condition for a model");
    check->add_option("--config", config_path, "Model JSON")->required();
    int xk = 3, xq = 2;
    double xtol = 1e-6;
    auto* xorsat = threshold->add_subcommand("xorsat", "k-XORSAT threshold by bisection");
    xorsat->add_option("-k", xk, "Check degree")->capture_default_str();
    xorsat->add_option("-q", xq, "Field order")->capture_default_str();
    xorsat->add_option("--tol", xtol, "Bracket width")->capture_default_str();

    // phi curve
    auto* phi_cmd = app.add_subcommand("phi", "Phi evaluation");
    phi_cmd->require_subcommand(1);
    auto* curve = phi_cmd->add_subcommand("curve", "Phi on a uniform grid, as CSV");
    int curve_points = 101;
    std::string out_path;
    curve->add_option("--config", config_path, "Model JSON")->required();
    curve->add_option("--points", curve_points, "Grid points")->capture_default_str();
    curve->add_option("--out", out_path, "Output file");

    // gen
    auto* gen = app.add_subcommand("gen", "Sample a matrix");
    int gen_n = 0;
    std::uint64_t seed = 0;
    std::string model = "simple";
    gen->add_option("--config", config_path, "Model JSON")->required();
    gen->add_option("-n", gen_n, "Number of variables")->required();
    gen->add_option("--seed", seed, "Seed")->capture_default_str();
    gen->add_option("--model", model, "simple or pairing")
        ->check(CLI::IsMember({"simple", "pairing"}))
        ->capture_default_str();
    gen->add_option("--out", out_path, "Matrix Market output");

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "Rank, nullity and frozen coordinates of a matrix");
    std::string in_path;
    bool want_kernel = false, want_frozen = false;
    rank_cmd->add_option("--in", in_path, "Matrix Market input")->required();
    rank_cmd->add_flag("--kernel", want_kernel, "Include a kernel basis");
    rank_cmd->add_flag("--frozen", want_frozen, "Include the frozen columns");

    // lattice
    auto* lattice = app.add_subcommand("lattice", "Frequency-vector lattices");
    lattice->require_subcommand(1);
    int lq = 2;
    std::vector<int> coeff_codes;
    auto* lbasis = lattice->add_subcommand("basis", "Construct a basis");
    auto* lverify = lattice->add_subcommand("verify", "Verify the constructed basis against brute force");
    for (auto* sub : {lbasis, lverify}) {
        sub->add_option("-q", lq, "Field order")->required();
        sub->add_option("--coeffs", coeff_codes, "Coefficient codes")->delimiter(',')->required();
    }

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo experiments");
    mc->require_subcommand(1);
    int jobs = 0;
    bool no_timing = false;
    std::vector<std::pair<CLI::App*, Experiment>> experiments;
    for (auto [name, e] : {std::pair{"fullrank", Experiment::FullRank}, std::pair{"rankformula", Experiment::RankFormula},
                           std::pair{"nullity", Experiment::NullityTernary}}) {
        auto* sub = mc->add_subcommand(name, "Run the " + std::string(name) + " experiment");
        sub->add_option("--config", config_path, "Experiment JSON")->required();
        sub->add_option("--jobs", jobs, "Worker threads (overrides config)");
        sub->add_option("--out", out_path, "CSV output (overrides config)");
        sub->add_flag("--no-timing", no_timing, "Omit wall_ms for byte comparison");
        experiments.emplace_back(sub, e);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*check) {
            const ModelSpec spec = parse_model(read_file(config_path));
            const auto r = condition_check(spec);
            const auto m = phi_max(spec);
            const json out = {{"holds", r.holds},
                              {"coprime", r.coprime},
                              {"phi0", r.phi0},
                              {"max_phi_interior", r.max_phi_interior},
                              {"argmax", r.argmax},
                              {"margin", r.margin},
                              {"boundary_case", r.boundary_case},
                              {"phi_max", {{"argmax", m.argmax}, {"value", m.value}, {"maximizers", m.maximizers}}},
                              {"normalized_rank", 1.0 - m.value}};
            std::cout << out.dump(2) << "\n";
        } else if (*xorsat) {
            const json out = {{"k", xk}, {"q", xq}, {"threshold", xorsat_threshold(xk, xq, xtol)}};
            std::cout << out.dump(2) << "\n";
        } else if (*curve) {
            ExperimentConfig cfg(parse_model(read_file(config_path)));
            cfg.experiment = Experiment::PhiCurve;
            cfg.curve_points = curve_points;
            if (curve_points < 2) throw Error(ErrorCode::BadConfig, "--points must be at least 2");
            const auto result = run_experiment(cfg);
            with_output(out_path, [&](std::ostream& os) { write_csv(os, cfg, result); });
        } else if (*gen) {
            const ModelSpec spec = parse_model(read_file(config_path));
            Rng rng(seed);
            const auto degs = sample_degrees(spec, gen_n, rng);
            const SparseMatrix a = model == "pairing" ? gen_pairing(spec, degs, rng) : gen_simple(spec, degs, rng);
            long long sum_d = 0;
            for (int d : degs.dvec) sum_d += d;
            const MatrixMarketInfo info{seed, model, sum_d, sum_d};
            with_output(out_path, [&](std::ostream& os) { write_matrix_market(os, a, info); });
        } else if (*rank_cmd) {
            std::ifstream in(in_path);
            if (!in) throw Error(ErrorCode::BadInput, "cannot open " + in_path);
            const SparseMatrix a = read_matrix_market(in);
            const KernelSummary k = kernel(a);
            json out = {{"rank", a.ncols - k.nullity},
                        {"nullity", k.nullity},
                        {"frozen_count", k.frozen.size()},
                        {"nrows", a.nrows},
                        {"ncols", a.ncols},
                        {"q", a.field->q()}};
            if (want_frozen) out["frozen"] = k.frozen;
            if (want_kernel) {
                json basis = json::array();
                for (const auto& v : k.basis) {
                    std::vector<int> codes;
                    for (Elem e : v) codes.push_back(e.v);
                    basis.push_back(codes);
                }
                out["kernel"] = basis;
            }
            std::cout << out.dump(2) << "\n";
        } else if (*lbasis || *lverify) {
            const FieldPtr field = Field::make(lq);
            const auto coeffs = parse_coeffs(coeff_codes, *field);
            const bool identical =
                std::all_of(coeffs.begin(), coeffs.end(), [&](Elem c) { return c == coeffs.front(); });
            json out = {{"q", lq}, {"coeffs", coeff_codes}};
            LatticeBasis basis;
            if (identical) {
                const auto b = basis_identical(*field);
                basis = b.a_q;
                out["construction"] = "identical";
                out["m_q"] = to_json(b.m_q);
                out["a_q"] = to_json(b.a_q);
            } else {
                const auto g = basis_general(*field, coeffs);
                basis = g.basis;
                out["construction"] = "general";
                out["case"] = g.construction_case;
                out["orbit_size"] = g.orbit_size;
                out["basis"] = to_json(g.basis);
            }
            if (*lverify) {
                const auto r = verify_basis(field, coeffs, basis);
                out["vectors_are_solutions"] = r.vectors_are_solutions;
                out["hnf_matches"] = r.hnf_matches;
                out["det_matches"] = r.det_matches;
                out["det_abs"] = r.det_abs;
                out["expected_det"] = r.expected_det;
                out["ok"] = r.ok();
            }
            std::cout << out.dump(2) << "\n";
        } else {
            for (auto& [sub, e] : experiments) {
                if (!*sub) continue;
                ExperimentConfig cfg = parse_config(read_file(config_path));
                cfg.experiment = e;
                if (jobs > 0) cfg.jobs = jobs;
                if (!out_path.empty()) cfg.out_path = out_path;
                const auto result = run_experiment(cfg);
                with_output(cfg.out_path, [&](std::ostream& os) { write_csv(os, cfg, result, !no_timing); });
                if (result.any_n_without_data()) {
                    std::cerr << "every trial for some n exhausted its retries\n";
                    return 3;
                }
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
