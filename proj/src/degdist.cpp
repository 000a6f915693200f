#include "sparse_rank/degdist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparse_rank/error.hpp"

namespace sparse_rank {

namespace {

constexpr double kSumTol = 1e-12;

// Neumaier summation; truncated tails have up to ~10^6 atoms.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::BadParameter, what);
}

void check_tol(double tol) {
    require(tol > 0.0 && tol <= 1e-8, "truncation tolerance must lie in (0, 1e-8]");
}

}  // namespace

DegreeDist::DegreeDist(std::vector<Atom> atoms, double tail_mass_dropped)
    : atoms_(std::move(atoms)), tail_mass_dropped_(tail_mass_dropped) {
    require(!atoms_.empty(), "empty distribution");
    CompensatedSum total;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        require(atoms_[i].value >= 0, "degrees must be non-negative");
        require(atoms_[i].prob > 0.0 && atoms_[i].prob <= 1.0, "atom probabilities must lie in (0, 1]");
        require(i == 0 || atoms_[i - 1].value < atoms_[i].value, "atom values must be strictly increasing");
        total.add(atoms_[i].prob);
    }
    require(std::abs(total.value() - 1.0) <= kSumTol, "probabilities must sum to 1");

    cdf_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        acc += atoms_[i].prob;
        cdf_[i] = acc;
    }
    cdf_.back() = 1.0;

    dense_.assign(static_cast<std::size_t>(atoms_.back().value) + 1, 0.0);
    for (const Atom& a : atoms_) dense_[a.value] = a.prob;
    mean_ = horner(1.0, 1);
}

DegreeDist DegreeDist::fixed(int value) {
    require(value >= 0, "fixed degree must be non-negative");
    return DegreeDist({{value, 1.0}}, 0.0);
}

DegreeDist DegreeDist::table(std::vector<std::pair<int, double>> pairs) {
    std::sort(pairs.begin(), pairs.end());
    std::vector<Atom> atoms;
    atoms.reserve(pairs.size());
    for (const auto& [value, prob] : pairs) atoms.push_back({value, prob});
    return DegreeDist(std::move(atoms), 0.0);
}

DegreeDist DegreeDist::poisson(double mean, double tol) {
    require(mean > 0.0 && std::isfinite(mean), "Poisson mean must be positive");
    check_tol(tol);
    // Evaluate the pmf far past the cutoff, then accumulate tails from the right.
    const int stop = static_cast<int>(std::ceil(mean + 40.0 * std::sqrt(mean) + 60.0));
    std::vector<double> pmf(static_cast<std::size_t>(stop) + 1);
    for (int j = 0; j <= stop; ++j) {
        pmf[j] = std::exp(-mean + j * std::log(mean) - std::lgamma(j + 1.0));
    }
    std::vector<double> tail(pmf.size(), 0.0);  // tail[j] = P[X > j]
    for (int j = stop - 1; j >= 0; --j) tail[j] = tail[j + 1] + pmf[j + 1];
    int cutoff = 0;
    while (tail[cutoff] >= tol) ++cutoff;

    const double kept = 1.0 - tail[cutoff];
    std::vector<Atom> atoms;
    for (int j = 0; j <= cutoff; ++j) {
        if (pmf[j] > 0.0) atoms.push_back({j, pmf[j] / kept});
    }
    CompensatedSum total;
    for (const Atom& a : atoms) total.add(a.prob);
    for (Atom& a : atoms) a.prob /= total.value();
    return DegreeDist(std::move(atoms), tail[cutoff]);
}

DegreeDist DegreeDist::powerlaw(double alpha, int kmin, double tol) {
    require(alpha > 3.0 && std::isfinite(alpha), "power-law exponent must exceed 3");
    require(kmin >= 1, "power-law kmin must be at least 1");
    check_tol(tol);
    // Sum_{l > L} l^-alpha <= int_{L+1/2}^inf x^-alpha dx by convexity.
    auto tail_bound = [alpha](double L) { return std::pow(L + 0.5, 1.0 - alpha) / (alpha - 1.0); };
    std::vector<double> weights;
    CompensatedSum partial;
    int L = kmin;
    for (;; ++L) {
        const double w = std::pow(static_cast<double>(L), -alpha);
        weights.push_back(w);
        partial.add(w);
        if (tail_bound(L) / (partial.value() + tail_bound(L)) < tol) break;
    }
    const double dropped = tail_bound(L) / (partial.value() + tail_bound(L));
    std::vector<Atom> atoms;
    atoms.reserve(weights.size());
    CompensatedSum total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        atoms.push_back({kmin + static_cast<int>(i), weights[i] / partial.value()});
        total.add(atoms.back().prob);
    }
    for (Atom& a : atoms) a.prob /= total.value();
    return DegreeDist(std::move(atoms), dropped);
}

double DegreeDist::second_moment() const noexcept {
    double m2 = 0.0;
    for (const Atom& a : atoms_) m2 += static_cast<double>(a.value) * a.value * a.prob;
    return m2;
}

double DegreeDist::horner(double x, int derivative) const {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::OutOfDomain, "pgf argument " + std::to_string(x) + " outside [0, 1]");
    }
    // Compensated Horner: long truncated tails otherwise lose ~1e-11 at x = 1.
    double acc = 0.0;
    double err = 0.0;
    for (int v = static_cast<int>(dense_.size()) - 1; v >= derivative; --v) {
        double c = dense_[v];
        if (derivative >= 1) c *= v;
        if (derivative >= 2) c *= v - 1;
        const double prod = acc * x;
        const double prod_err = std::fma(acc, x, -prod);
        const double sum = prod + c;
        const double bb = sum - prod;
        const double sum_err = (prod - (sum - bb)) + (c - bb);
        acc = sum;
        err = err * x + (prod_err + sum_err);
    }
    return acc + err;
}

double DegreeDist::pgf(double x) const { return horner(x, 0); }
double DegreeDist::pgf_d1(double x) const { return horner(x, 1); }
double DegreeDist::pgf_d2(double x) const { return horner(x, 2); }

int DegreeDist::gcd_support() const noexcept {
    int g = 0;
    for (const Atom& a : atoms_) g = std::gcd(g, a.value);
    return g;
}

DegreeDist DegreeDist::size_biased() const {
    require(mean_ > 0.0, "size-biasing needs a positive mean");
    std::vector<Atom> atoms;
    CompensatedSum total;
    for (const Atom& a : atoms_) {
        if (a.value == 0) continue;
        atoms.push_back({a.value, a.value * a.prob / mean_});
        total.add(atoms.back().prob);
    }
    for (Atom& a : atoms) a.prob /= total.value();
    return DegreeDist(std::move(atoms), 0.0);
}

int DegreeDist::sample(Rng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return atoms_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1))].value;
}

}  // namespace sparse_rank
