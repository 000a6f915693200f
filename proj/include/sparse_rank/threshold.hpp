#pragma once

#include <vector>

#include "sparse_rank/degdist.hpp"
#include "sparse_rank/model.hpp"

namespace sparse_rank {

/// The functional
///   Phi(z) = D(1 - K'(z)/k) - (d/k) (1 - K(z) - (1 - z) K'(z)),  z in [0, 1],
/// built from the variable- and check-degree generating functions.
///
/// Besides the direct formula, gap(z) = Phi(z) - Phi(0) is evaluated in a form
/// free of cancellation: the first-order terms of D(1-u) - 1 and (d/k)K'(z)
/// cancel analytically, leaving
///   gap(z) = sum_j P[d=j] ((1-u)^j - 1 + j u) + (d/k) sum_i P[k=i] (1-i) z^i
/// with u = K'(z)/k. Near 0 this is O(z^{kmin}) and keeps full relative
/// precision, which the strict-inequality test below depends on.
class PhiFunction {
public:
    PhiFunction(const DegreeDist& ddist, const DegreeDist& kdist);

    /// OutOfDomain outside [0, 1].
    double operator()(double z) const;
    double gap(double z) const;
    double phi0() const noexcept { return phi0_; }
    double mean_d() const noexcept { return mean_d_; }
    double mean_k() const noexcept { return mean_k_; }
    int min_check_degree() const noexcept { return kmin_; }

    /// D(1 - K'(z)/k), the variable-side term (also used by tilde_phi).
    double outer_pgf(double z) const;

private:
    double check_ratio(double z) const;  // K'(z)/k, clamped to [0, 1]

    DegreeDist ddist_;
    DegreeDist kdist_;
    double mean_d_;
    double mean_k_;
    double phi0_;
    int kmin_;
    std::vector<double> dense_d_;
    std::vector<double> suffix_mass_;  // sum_{j >= i} P[d=j]
    std::vector<double> suffix_mean_;  // sum_{j >= i} j P[d=j]
};

double phi(const ModelSpec& spec, double z);

struct PhiMax {
    double argmax = 0.0;
    double value = 0.0;
    /// Every refined local maximiser whose value is within 1e-9 of the best.
    std::vector<double> maximizers;
};

/// Uniform grid scan plus golden-section refinement around each grid-local
/// maximum. grid_points >= 1000, refine_tol in (0, 1e-6].
PhiMax phi_max(const ModelSpec& spec, int grid_points = 2000, double refine_tol = 1e-10);
PhiMax phi_max(const DegreeDist& ddist, const DegreeDist& kdist, int grid_points = 2000,
               double refine_tol = 1e-10);

struct ConditionReport {
    bool holds = false;
    bool coprime = false;
    double phi0 = 0.0;
    /// max of Phi over [1e-4, 1].
    double max_phi_interior = 0.0;
    /// Where (Phi(z) - Phi(0)) / z^kmin peaks on (0, 1].
    double argmax = 0.0;
    /// -sup_{0<z<=1} (Phi(z) - Phi(0)) / z^kmin.
    double margin = 0.0;
    bool boundary_case = false;
};

inline constexpr double kStrictMargin = 1e-9;

/// Decides gcd(q, gcd supp d) = 1 and Phi(z) < Phi(0) on (0, 1].
ConditionReport condition_check(const ModelSpec& spec);
ConditionReport condition_check(const DegreeDist& ddist, const DegreeDist& kdist, int q);

/// Predicted limit of rank(A)/n: 1 - max Phi.
double normalized_rank(const ModelSpec& spec);

/// Largest Poisson mean d for which the condition holds with K(z) = z^k,
/// located by bisection on (0, k) to bracket width < tol.
double xorsat_threshold(int k, int q = 2, double tol = 1e-6);

/// Phi(alpha) + (exp(-3 delta beta^2) - 1) D(1 - K'(alpha)/k) - delta
///   + 3 delta beta^2 - 2 delta beta^3.
double tilde_phi(const ModelSpec& spec, double delta, double alpha, double beta);

struct TildePhiMax {
    double alpha = 0.0;
    double beta = 0.0;
    double value = 0.0;
};

/// 200 x 200 grid on the unit square, then alternating golden-section passes
/// along each coordinate.
TildePhiMax tilde_phi_max(const ModelSpec& spec, double delta);

/// Golden-section maximisation of f on [lo, hi]; returns the best point seen.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol);

}  // namespace sparse_rank

#include "sparse_rank/golden.inl"
