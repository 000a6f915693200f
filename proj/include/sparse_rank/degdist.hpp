#pragma once

#include <utility>
#include <vector>

#include "sparse_rank/rng.hpp"

namespace sparse_rank {

struct Atom {
    int value = 0;
    double prob = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite-support distribution on the non-negative integers.
///
/// Infinite laws (Poisson, power law) are truncated at the smallest cutoff
/// whose tail mass is below the requested tolerance and then renormalised;
/// the discarded mass is kept in tail_mass_dropped().
class DegreeDist {
public:
    static DegreeDist fixed(int value);
    /// Probabilities must be positive and sum to 1 within 1e-12.
    static DegreeDist table(std::vector<std::pair<int, double>> pairs);
    static DegreeDist poisson(double mean, double tol = 1e-12);
    /// P(v = l) proportional to l^-alpha for l >= kmin; alpha > 3.
    static DegreeDist powerlaw(double alpha, int kmin, double tol = 1e-12);

    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    double tail_mass_dropped() const noexcept { return tail_mass_dropped_; }
    int min_value() const noexcept { return atoms_.front().value; }
    int max_value() const noexcept { return atoms_.back().value; }

    double mean() const noexcept { return mean_; }
    double second_moment() const noexcept;

    /// D(x), D'(x), D''(x) on [0, 1] by Horner's scheme. OutOfDomain outside.
    double pgf(double x) const;
    double pgf_d1(double x) const;
    double pgf_d2(double x) const;

    /// gcd of the support values.
    int gcd_support() const noexcept;

    /// P[hat v = l] = l P[v = l] / E[v]. BadParameter when the mean is zero.
    DegreeDist size_biased() const;

    /// Inverse-CDF draw.
    int sample(Rng& rng) const;

    friend bool operator==(const DegreeDist&, const DegreeDist&) = default;

private:
    DegreeDist(std::vector<Atom> atoms, double tail_mass_dropped);

    double horner(double x, int derivative) const;

    std::vector<Atom> atoms_;
    std::vector<double> cdf_;
    std::vector<double> dense_;  // dense_[v] = P[v], v in [0, max_value]
    double tail_mass_dropped_ = 0.0;
    double mean_ = 0.0;
};

}  // namespace sparse_rank
