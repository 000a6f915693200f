#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparse_rank/gf.hpp"
#include "sparse_rank/model.hpp"
#include "sparse_rank/rng.hpp"

namespace sparse_rank {

struct DegreeSequencePair {
    std::vector<int> dvec;
    std::vector<int> kvec;
    int n = 0;
    int m = 0;
};

struct Entry {
    int col;
    Elem coef;
    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Row-major sparse matrix over F_q. Rows hold strictly increasing columns and
/// non-zero coefficients only.
struct SparseMatrix {
    int nrows = 0;
    int ncols = 0;
    std::vector<std::vector<Entry>> rows;
    FieldPtr field;

    /// Throws BadInput if an invariant is violated.
    void validate() const;
    std::size_t nnz() const noexcept;
    bool operator==(const SparseMatrix& other) const;
};

/// Rejection sampler for (d_1..d_n, k_1..k_m) conditioned on sum d = sum k,
/// with m ~ Poisson(dn/k). max_tries = 0 selects 200 sqrt(n).
/// With require_divisible, n must be a multiple of gcd supp k (BadParameter).
/// RetriesExhausted when no pair is found.
DegreeSequencePair sample_degrees(const ModelSpec& spec, int n, Rng& rng, long long max_tries = 0,
                                  bool require_divisible = false);

/// Throws BadParameter if the pair is inconsistent.
void check_degrees(const DegreeSequencePair& degs);

/// Configuration model: uniform matching of check clones to variable clones.
/// Entry (i, j) is one chi draw times the i-j edge multiplicity, read in F_q.
SparseMatrix gen_pairing(const ModelSpec& spec, const DegreeSequencePair& degs, Rng& rng);

/// Rejects matchings until the bipartite graph is simple. RetriesExhausted.
SparseMatrix gen_simple(const ModelSpec& spec, const DegreeSequencePair& degs, Rng& rng,
                        long long max_tries = 1'000'000);

/// 0/1 adjacency pattern over the given field. With simple = false the
/// pattern of a single matching is used (1 wherever an edge exists).
SparseMatrix gen_biadjacency(const DegreeSequencePair& degs, Rng& rng, bool simple, FieldPtr field,
                             long long max_tries = 1'000'000);

/// Appends t rows with three uniform (with replacement) positions and iid chi
/// coefficients; colliding positions are summed.
SparseMatrix add_ternary_rows(const SparseMatrix& a, int t, Rng& rng, const ModelSpec& spec);

/// Appends theta rows, each a single 1 in a uniform column.
SparseMatrix pin(const SparseMatrix& a, int theta, Rng& rng);

struct MatrixMarketInfo {
    std::uint64_t seed = 0;
    std::string model;
    long long sum_d = 0;
    long long sum_k = 0;
};

/// Coordinate format, 1-based indices, values are element codes.
void write_matrix_market(std::ostream& out, const SparseMatrix& a, const MatrixMarketInfo& info);
/// The field comes from the "q=" header comment unless given. BadInput.
SparseMatrix read_matrix_market(std::istream& in, FieldPtr field = nullptr);

}  // namespace sparse_rank
