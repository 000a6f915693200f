#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sparse_rank/gf.hpp"

namespace sparse_rank {

using IntVec = std::vector<long long>;

/// Largest q^k0 that solutions() will enumerate.
inline constexpr long long kSolutionCap = 10'000'000;

struct SolutionSet {
    FieldPtr field;
    std::vector<Elem> coeffs;
    std::vector<std::vector<Elem>> sols;
};

/// Calls visit once per sigma in F_q^k0 with sum coeffs_i sigma_i = 0.
/// BadParameter on a zero coefficient, TooLarge above kSolutionCap.
void for_each_solution(const Field& field, std::span<const Elem> coeffs,
                       const std::function<void(std::span<const Elem>)>& visit);
SolutionSet solutions(FieldPtr field, std::span<const Elem> coeffs);

/// Counts of each unit in sigma; coordinate f(s) - 1 holds the count of s.
IntVec freq_vector(const Field& field, std::span<const Elem> sigma);

/// Hermite normal form of the module generated by the given column vectors.
/// basis holds the non-zero HNF columns; column j has its pivot in row
/// pivot_rows[j], is zero above it, and every entry to the right of a pivot in
/// that row lies in [0, pivot). Throws TooLarge on int64 overflow.
struct Hnf {
    int dim = 0;
    std::vector<IntVec> basis;
    std::vector<int> pivot_rows;
    long long det_abs = 0;  // product of pivots when of full rank, else 0

    bool operator==(const Hnf& other) const = default;
};

Hnf hnf(std::span<const IntVec> generators, int dim);

/// |det| of a square matrix (columns) by fraction-free Bareiss elimination
/// over arbitrary-precision integers. TooLarge if the result exceeds int64.
long long det_bareiss(std::span<const IntVec> columns);

/// HNF of the frequency vectors of all solutions.
Hnf module_bruteforce(const FieldPtr& field, std::span<const Elem> coeffs);

struct LatticeBasis {
    std::vector<IntVec> vectors;  // q - 1 columns in f-order
    long long det_abs = 0;
};

struct IdenticalBases {
    LatticeBasis m_q;  // e_f(h) + sum_i a_i e_f(-X^i)
    LatticeBasis a_q;  // l1-norm at most 3
};

/// Bases of the module for an equation whose coefficients all coincide.
IdenticalBases basis_identical(const Field& field);

struct GeneralBasis {
    LatticeBasis basis;
    int construction_case = 0;  // 1, 2 or 3
    Elem chi2;                  // normalised coefficients driving the construction
    Elem chi3;
    int orbit_size = 0;
};

/// Basis of Z^(F_q^*) made of solution frequency vectors of l1-norm <= 3 for
/// coefficients that are not all equal. BadInput otherwise.
GeneralBasis basis_general(const Field& field, std::span<const Elem> coeffs);

/// True if v is the frequency vector of a solution. When every coefficient
/// is the same, the equation is lengthened as needed.
bool is_solution_frequency(const Field& field, std::span<const Elem> coeffs, const IntVec& v);

struct VerifyReport {
    bool vectors_are_solutions = false;
    bool hnf_matches = false;
    bool det_matches = false;
    long long det_abs = 0;
    long long expected_det = 0;
    bool ok() const noexcept { return vectors_are_solutions && hnf_matches && det_matches; }
};

VerifyReport verify_basis(const FieldPtr& field, std::span<const Elem> coeffs, const LatticeBasis& basis);

struct IntersectReport {
    bool holds = false;
    long long points_checked = 0;
    long long divisible_points = 0;
    long long violations = 0;
};

/// Checks that a lattice point with all coordinates divisible by f_d lies in
/// f_d times the module, and conversely, for every combination of the basis
/// with coefficients in [-f_d, f_d]. NotCoprime if gcd(f_d, q) > 1.
IntersectReport intersect_divisible(const Field& field, const LatticeBasis& basis, int f_d,
                                    long long max_points = 50'000'000);

}  // namespace sparse_rank
