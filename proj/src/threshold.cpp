#include "sparse_rank/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparse_rank/error.hpp"

namespace sparse_rank {

namespace {

constexpr double kInteriorStart = 1e-4;
constexpr int kConditionGrid = 2000;
constexpr int kNearZeroPoints = 20;

void check_unit(double z, const char* what) {
    if (!(z >= 0.0 && z <= 1.0)) {
        throw Error(ErrorCode::OutOfDomain, std::string(what) + " = " + std::to_string(z) + " outside [0, 1]");
    }
}

// (1-u)^j - 1 + j u for j u <= 1/4 as the alternating binomial tail
// sum_{m>=2} C(j,m) (-u)^m.
double binomial_tail(int j, double u) {
    double term = -static_cast<double>(j) * u;
    double sum = 0.0;
    for (int m = 2; m <= j; ++m) {
        term *= -static_cast<double>(j - m + 1) / m * u;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

struct LocalMax {
    double z;
    double value;
};

// Grid-local maxima of f over the points zs, each refined by golden section
// within its neighbouring grid cells.
template <class F>
std::vector<LocalMax> scan_and_refine(F&& f, const std::vector<double>& zs, double tol) {
    std::vector<double> vals(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) vals[i] = f(zs[i]);
    std::vector<LocalMax> out;
    const std::size_t n = zs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || vals[i] >= vals[i - 1];
        const bool right_ok = i + 1 == n || vals[i] >= vals[i + 1];
        if (!left_ok || !right_ok) continue;
        LocalMax best{zs[i], vals[i]};
        const double lo = i == 0 ? zs[i] : zs[i - 1];
        const double hi = i + 1 == n ? zs[i] : zs[i + 1];
        if (hi > lo) {
            const auto [x, fx] = golden_max(f, lo, hi, tol);
            if (fx > best.value) best = {x, fx};
        }
        out.push_back(best);
    }
    return out;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    std::vector<double> zs(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) zs[i] = lo + (hi - lo) * i / (points - 1);
    zs.back() = hi;
    return zs;
}

}  // namespace

PhiFunction::PhiFunction(const DegreeDist& ddist, const DegreeDist& kdist)
    : ddist_(ddist), kdist_(kdist), mean_d_(ddist.mean()), mean_k_(kdist.mean()), kmin_(kdist.min_value()) {
    if (kmin_ < 3) throw Error(ErrorCode::BadParameter, "check degrees must be at least 3");
    dense_d_.assign(static_cast<std::size_t>(ddist.max_value()) + 1, 0.0);
    for (const Atom& a : ddist.atoms()) dense_d_[a.value] = a.prob;
    suffix_mass_.assign(dense_d_.size() + 1, 0.0);
    suffix_mean_.assign(dense_d_.size() + 1, 0.0);
    for (int j = static_cast<int>(dense_d_.size()) - 1; j >= 0; --j) {
        suffix_mass_[j] = suffix_mass_[j + 1] + dense_d_[j];
        suffix_mean_[j] = suffix_mean_[j + 1] + j * dense_d_[j];
    }
    phi0_ = (*this)(0.0);
}

double PhiFunction::check_ratio(double z) const {
    return std::clamp(kdist_.pgf_d1(z) / mean_k_, 0.0, 1.0);
}

double PhiFunction::outer_pgf(double z) const {
    check_unit(z, "z");
    return ddist_.pgf(1.0 - check_ratio(z));
}

double PhiFunction::operator()(double z) const {
    check_unit(z, "z");
    const double kp = kdist_.pgf_d1(z);
    const double u = std::clamp(kp / mean_k_, 0.0, 1.0);
    return ddist_.pgf(1.0 - u) - mean_d_ / mean_k_ * (1.0 - kdist_.pgf(z) - (1.0 - z) * kp);
}

double PhiFunction::gap(double z) const {
    check_unit(z, "z");
    const double u = check_ratio(z);
    const int top = static_cast<int>(dense_d_.size()) - 1;

    double variable_part = 0.0;
    if (u > 0.0) {
        // Atoms with j u <= 1/4 use the binomial tail, the rest Horner.
        const double cut = std::floor(0.25 / u) + 1.0;
        const int split = cut > top ? top + 1 : static_cast<int>(cut);
        for (int j = 2; j < split; ++j) {
            if (dense_d_[j] > 0.0) variable_part += dense_d_[j] * binomial_tail(j, u);
        }
        if (split <= top) {
            const double x = 1.0 - u;
            double acc = 0.0;
            for (int j = top; j >= split; --j) acc = acc * x + dense_d_[j];
            acc *= std::pow(x, split);
            variable_part += acc - suffix_mass_[split] + u * suffix_mean_[split];
        }
    }

    double check_part = 0.0;
    for (const Atom& a : kdist_.atoms()) {
        check_part += a.prob * (1.0 - a.value) * std::pow(z, a.value);
    }
    return variable_part + mean_d_ / mean_k_ * check_part;
}

double phi(const ModelSpec& spec, double z) { return PhiFunction(spec.ddist(), spec.kdist())(z); }

PhiMax phi_max(const DegreeDist& ddist, const DegreeDist& kdist, int grid_points, double refine_tol) {
    if (grid_points < 1000) throw Error(ErrorCode::BadParameter, "phi_max needs at least 1000 grid points");
    if (!(refine_tol > 0.0 && refine_tol <= 1e-6)) {
        throw Error(ErrorCode::BadParameter, "refine_tol must lie in (0, 1e-6]");
    }
    const PhiFunction f(ddist, kdist);
    auto gap = [&](double z) { return f.gap(z); };
    auto maxima = scan_and_refine(gap, uniform_grid(0.0, 1.0, grid_points), refine_tol);

    PhiMax out;
    const auto best = std::max_element(maxima.begin(), maxima.end(), [](const LocalMax& a, const LocalMax& b) {
        return a.value < b.value || (a.value == b.value && a.z > b.z);
    });
    out.argmax = best->z;
    out.value = f.phi0() + best->value;
    for (const LocalMax& m : maxima) {
        if (best->value - m.value <= kStrictMargin) out.maximizers.push_back(m.z);
    }
    std::sort(out.maximizers.begin(), out.maximizers.end());
    return out;
}

PhiMax phi_max(const ModelSpec& spec, int grid_points, double refine_tol) {
    return phi_max(spec.ddist(), spec.kdist(), grid_points, refine_tol);
}

ConditionReport condition_check(const DegreeDist& ddist, const DegreeDist& kdist, int q) {
    const PhiFunction f(ddist, kdist);
    ConditionReport report;
    report.coprime = std::gcd(q, ddist.gcd_support()) == 1;
    report.phi0 = f.phi0();

    const int kmin = f.min_check_degree();
    auto scaled = [&](double z) { return f.gap(z) / std::pow(z, kmin); };
    auto gap = [&](double z) { return f.gap(z); };
    const auto grid = uniform_grid(kInteriorStart, 1.0, kConditionGrid);

    double best_gap = -INFINITY;
    for (const LocalMax& m : scan_and_refine(gap, grid, 1e-10)) best_gap = std::max(best_gap, m.value);
    report.max_phi_interior = report.phi0 + best_gap;

    double sup = -INFINITY;
    double arg = 1.0;
    for (int j = 1; j <= kNearZeroPoints; ++j) {
        const double z = kInteriorStart * std::pow(10.0, -8.0 * j / kNearZeroPoints);
        const double h = scaled(z);
        if (h > sup) {
            sup = h;
            arg = z;
        }
    }
    for (const LocalMax& m : scan_and_refine(scaled, grid, 1e-10)) {
        if (m.value > sup) {
            sup = m.value;
            arg = m.z;
        }
    }
    report.argmax = arg;
    report.margin = -sup;
    report.boundary_case = std::abs(sup) <= kStrictMargin;
    report.holds = report.coprime && report.margin > kStrictMargin;
    return report;
}

ConditionReport condition_check(const ModelSpec& spec) {
    return condition_check(spec.ddist(), spec.kdist(), spec.q());
}

double normalized_rank(const ModelSpec& spec) { return 1.0 - phi_max(spec).value; }

double xorsat_threshold(int k, int q, double tol) {
    if (k < 3) throw Error(ErrorCode::BadParameter, "k-XORSAT needs k >= 3");
    if (!(tol > 0.0 && tol <= 1e-4)) throw Error(ErrorCode::BadParameter, "tol must lie in (0, 1e-4]");
    const DegreeDist kdist = DegreeDist::fixed(k);
    double lo = 0.0;
    double hi = static_cast<double>(k);
    while (hi - lo >= tol) {
        const double mid = 0.5 * (lo + hi);
        const auto report = condition_check(DegreeDist::poisson(mid, 1e-12), kdist, q);
        if (report.holds && !report.boundary_case) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double tilde_phi(const ModelSpec& spec, double delta, double alpha, double beta) {
    if (!(delta > 0.0 && delta <= 0.1)) throw Error(ErrorCode::BadParameter, "delta must lie in (0, 0.1]");
    check_unit(alpha, "alpha");
    check_unit(beta, "beta");
    const PhiFunction f(spec.ddist(), spec.kdist());
    const double b2 = beta * beta;
    return f(alpha) + std::expm1(-3.0 * delta * b2) * f.outer_pgf(alpha) - delta + 3.0 * delta * b2 -
           2.0 * delta * b2 * beta;
}

TildePhiMax tilde_phi_max(const ModelSpec& spec, double delta) {
    if (!(delta > 0.0 && delta <= 0.1)) throw Error(ErrorCode::BadParameter, "delta must lie in (0, 0.1]");
    const PhiFunction f(spec.ddist(), spec.kdist());
    auto value = [&](double alpha, double beta) {
        const double b2 = beta * beta;
        return f(alpha) + std::expm1(-3.0 * delta * b2) * f.outer_pgf(alpha) - delta + 3.0 * delta * b2 -
               2.0 * delta * b2 * beta;
    };

    constexpr int kGrid = 200;
    const double step = 1.0 / (kGrid - 1);
    TildePhiMax best{0.0, 0.0, -INFINITY};
    for (int i = 0; i < kGrid; ++i) {
        const double alpha = i * step;
        const double phi_a = f(alpha);
        const double outer = f.outer_pgf(alpha);
        for (int j = 0; j < kGrid; ++j) {
            const double beta = j * step;
            const double b2 = beta * beta;
            const double v = phi_a + std::expm1(-3.0 * delta * b2) * outer - delta + 3.0 * delta * b2 -
                             2.0 * delta * b2 * beta;
            if (v > best.value) best = {alpha, beta, v};
        }
    }
    for (int round = 0; round < 4; ++round) {
        const auto [a, va] = golden_max([&](double x) { return value(x, best.beta); },
                                        std::max(0.0, best.alpha - step), std::min(1.0, best.alpha + step), 1e-10);
        if (va > best.value) best = {a, best.beta, va};
        const auto [b, vb] = golden_max([&](double y) { return value(best.alpha, y); },
                                        std::max(0.0, best.beta - step), std::min(1.0, best.beta + step), 1e-10);
        if (vb > best.value) best = {best.alpha, b, vb};
    }
    return best;
}

}  // namespace sparse_rank
