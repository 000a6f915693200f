#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "sparse_rank/gf.hpp"
#include "sparse_rank/matgen.hpp"
#include "sparse_rank/rng.hpp"

namespace sparse_rank {

inline constexpr int kMaxDenseColumns = 8192;

struct EliminationResult {
    int rank = 0;
    std::vector<int> pivots;                   // ascending
    std::vector<std::vector<Elem>> rref_rows;  // row r has a 1 at pivots[r]
};

struct KernelSummary {
    int nullity = 0;
    std::vector<std::vector<Elem>> basis;  // one vector per free column
    std::vector<int> frozen;               // ascending
};

/// Reduced row echelon form maintained under row insertion. Rows are dense;
/// bit-packed when q = 2. Throws TooLarge above kMaxDenseColumns columns.
class IncrementalEchelon {
public:
    IncrementalEchelon(FieldPtr field, int ncols);

    /// Returns true if the rank grew.
    bool add_row(std::span<const Entry> row);
    bool add_dense(std::span<const Elem> row);

    int rank() const noexcept { return static_cast<int>(pivot_cols_.size()); }
    int ncols() const noexcept { return ncols_; }
    int nullity() const noexcept { return ncols_ - rank(); }

    EliminationResult result() const;
    /// Column i is frozen iff its pivot row has no other non-zero entry.
    std::vector<int> frozen() const;
    KernelSummary kernel() const;

private:
    bool insert(std::vector<std::uint64_t>& bits, std::vector<std::uint16_t>& dense);
    Elem at(int row, int col) const;

    FieldPtr field_;
    int ncols_;
    bool binary_;
    int words_;
    std::vector<int> pivot_cols_;           // insertion order
    std::vector<int> row_of_col_;           // -1 for non-pivot columns
    std::vector<std::uint64_t> bit_rows_;   // rank x words_
    std::vector<std::uint16_t> dense_rows_;  // rank x ncols_
};

EliminationResult eliminate(const SparseMatrix& a);
int rank(const SparseMatrix& a);
int nullity(const SparseMatrix& a);
KernelSummary kernel(const SparseMatrix& a);

/// Uniform element of the kernel spanned by summary.basis.
std::vector<Elem> sample_kernel(const KernelSummary& summary, int ncols, const Field& field, Rng& rng);
std::vector<Elem> sample_kernel(const SparseMatrix& a, Rng& rng);

/// A x over F_q.
std::vector<Elem> multiply(const SparseMatrix& a, std::span<const Elem> x);

/// rho(s) = sum_i d_i 1{sigma_i = s}, keyed by element code. LengthMismatch.
std::map<std::uint16_t, long long> rho(std::span<const Elem> sigma, std::span<const int> dvec);

enum class RowRankVerdict { Full, NotFull, Inconclusive };
std::string_view to_string(RowRankVerdict v);

struct RowRankWitness {
    int prime;
    int rank;
};

struct RowRankReport {
    RowRankVerdict verdict = RowRankVerdict::Inconclusive;
    int nrows = 0;
    std::vector<RowRankWitness> witnesses;
};

/// One-sided certificate of full row rank over Q for a 0/1 pattern: ranks
/// modulo the prime_budget smallest primes coprime to f_d. A full rank modulo
/// any prime proves fullness; otherwise the verdict is NotFull (heuristic).
RowRankReport rational_full_row_rank(const SparseMatrix& b01, int prime_budget, int f_d = 1);

}  // namespace sparse_rank
