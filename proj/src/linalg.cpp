#include "sparse_rank/linalg.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "sparse_rank/error.hpp"

namespace sparse_rank {

IncrementalEchelon::IncrementalEchelon(FieldPtr field, int ncols)
    : field_(std::move(field)), ncols_(ncols), binary_(field_->q() == 2), words_((ncols + 63) / 64) {
    if (ncols < 0) throw Error(ErrorCode::BadParameter, "negative column count");
    if (ncols > kMaxDenseColumns) {
        throw Error(ErrorCode::TooLarge, std::to_string(ncols) + " columns exceed the dense limit " +
                                             std::to_string(kMaxDenseColumns));
    }
    row_of_col_.assign(static_cast<std::size_t>(ncols), -1);
}

bool IncrementalEchelon::add_row(std::span<const Entry> row) {
    std::vector<std::uint64_t> bits;
    std::vector<std::uint16_t> dense;
    if (binary_) {
        bits.assign(static_cast<std::size_t>(words_), 0);
        for (const Entry& e : row) bits[e.col >> 6] ^= std::uint64_t{1} << (e.col & 63);
    } else {
        dense.assign(static_cast<std::size_t>(ncols_), 0);
        for (const Entry& e : row) dense[e.col] = field_->add(Elem{dense[e.col]}, e.coef).v;
    }
    return insert(bits, dense);
}

bool IncrementalEchelon::add_dense(std::span<const Elem> row) {
    if (static_cast<int>(row.size()) != ncols_) throw Error(ErrorCode::LengthMismatch, "row length mismatch");
    std::vector<std::uint64_t> bits;
    std::vector<std::uint16_t> dense;
    if (binary_) {
        bits.assign(static_cast<std::size_t>(words_), 0);
        for (int c = 0; c < ncols_; ++c) {
            if (!row[c].is_zero()) bits[c >> 6] |= std::uint64_t{1} << (c & 63);
        }
    } else {
        dense.resize(static_cast<std::size_t>(ncols_));
        for (int c = 0; c < ncols_; ++c) dense[c] = row[c].v;
    }
    return insert(bits, dense);
}

bool IncrementalEchelon::insert(std::vector<std::uint64_t>& bits, std::vector<std::uint16_t>& dense) {
    const Field& f = *field_;
    const std::size_t r_new = pivot_cols_.size();
    if (binary_) {
        // Pivot rows are zero at every other pivot column, so clearing the
        // pivot bits of v in any order fully reduces it.
        for (int w = 0; w < words_; ++w) {
            while (true) {
                std::uint64_t word = bits[w];
                std::uint64_t hit = 0;
                while (word) {
                    const int c = w * 64 + std::countr_zero(word);
                    if (row_of_col_[c] >= 0) {
                        hit = std::uint64_t{1} << (c & 63);
                        const std::uint64_t* src = &bit_rows_[static_cast<std::size_t>(row_of_col_[c]) * words_];
                        for (int k = 0; k < words_; ++k) bits[k] ^= src[k];
                        break;
                    }
                    word &= word - 1;
                }
                if (!hit) break;
            }
        }
        int pivot = -1;
        for (int w = 0; w < words_ && pivot < 0; ++w) {
            if (bits[w]) pivot = w * 64 + std::countr_zero(bits[w]);
        }
        if (pivot < 0) return false;
        const int pw = pivot >> 6;
        const std::uint64_t pm = std::uint64_t{1} << (pivot & 63);
        for (std::size_t r = 0; r < r_new; ++r) {
            std::uint64_t* dst = &bit_rows_[r * words_];
            if (dst[pw] & pm) {
                for (int k = 0; k < words_; ++k) dst[k] ^= bits[k];
            }
        }
        bit_rows_.insert(bit_rows_.end(), bits.begin(), bits.end());
        pivot_cols_.push_back(pivot);
        row_of_col_[pivot] = static_cast<int>(r_new);
        return true;
    }

    auto axpy = [&](std::uint16_t* dst, const std::uint16_t* src, Elem coef) {
        // dst -= coef * src
        const Elem neg = f.neg(coef);
        for (int k = 0; k < ncols_; ++k) {
            if (src[k]) dst[k] = f.add(Elem{dst[k]}, f.mul(neg, Elem{src[k]})).v;
        }
    };
    for (int c = 0; c < ncols_; ++c) {
        if (dense[c] && row_of_col_[c] >= 0) {
            axpy(dense.data(), &dense_rows_[static_cast<std::size_t>(row_of_col_[c]) * ncols_], Elem{dense[c]});
        }
    }
    int pivot = -1;
    for (int c = 0; c < ncols_; ++c) {
        if (dense[c]) {
            pivot = c;
            break;
        }
    }
    if (pivot < 0) return false;
    const Elem scale = f.inv(Elem{dense[pivot]});
    for (int k = pivot; k < ncols_; ++k) {
        if (dense[k]) dense[k] = f.mul(scale, Elem{dense[k]}).v;
    }
    for (std::size_t r = 0; r < r_new; ++r) {
        std::uint16_t* dst = &dense_rows_[r * ncols_];
        if (dst[pivot]) axpy(dst, dense.data(), Elem{dst[pivot]});
    }
    dense_rows_.insert(dense_rows_.end(), dense.begin(), dense.end());
    pivot_cols_.push_back(pivot);
    row_of_col_[pivot] = static_cast<int>(r_new);
    return true;
}

Elem IncrementalEchelon::at(int row, int col) const {
    if (binary_) {
        const std::uint64_t word = bit_rows_[static_cast<std::size_t>(row) * words_ + (col >> 6)];
        return Elem{static_cast<std::uint16_t>((word >> (col & 63)) & 1)};
    }
    return Elem{dense_rows_[static_cast<std::size_t>(row) * ncols_ + col]};
}

EliminationResult IncrementalEchelon::result() const {
    EliminationResult out;
    out.rank = rank();
    out.pivots = pivot_cols_;
    std::sort(out.pivots.begin(), out.pivots.end());
    out.rref_rows.reserve(out.pivots.size());
    for (int c : out.pivots) {
        std::vector<Elem> row(static_cast<std::size_t>(ncols_));
        for (int k = 0; k < ncols_; ++k) row[k] = at(row_of_col_[c], k);
        out.rref_rows.push_back(std::move(row));
    }
    return out;
}

std::vector<int> IncrementalEchelon::frozen() const {
    std::vector<int> out;
    for (int c = 0; c < ncols_; ++c) {
        const int r = row_of_col_[c];
        if (r < 0) continue;
        bool alone = true;
        if (binary_) {
            const std::uint64_t* src = &bit_rows_[static_cast<std::size_t>(r) * words_];
            int weight = 0;
            for (int k = 0; k < words_ && weight <= 1; ++k) weight += std::popcount(src[k]);
            alone = weight == 1;
        } else {
            const std::uint16_t* src = &dense_rows_[static_cast<std::size_t>(r) * ncols_];
            for (int k = 0; k < ncols_ && alone; ++k) alone = k == c || src[k] == 0;
        }
        if (alone) out.push_back(c);
    }
    return out;
}

KernelSummary IncrementalEchelon::kernel() const {
    const Field& f = *field_;
    KernelSummary out;
    out.nullity = nullity();
    out.frozen = frozen();
    std::vector<int> sorted = pivot_cols_;
    std::sort(sorted.begin(), sorted.end());
    for (int free = 0; free < ncols_; ++free) {
        if (row_of_col_[free] >= 0) continue;
        std::vector<Elem> v(static_cast<std::size_t>(ncols_));
        v[free] = Field::one();
        for (int c : sorted) v[c] = f.neg(at(row_of_col_[c], free));
        out.basis.push_back(std::move(v));
    }
    return out;
}

namespace {

IncrementalEchelon echelon_of(const SparseMatrix& a) {
    IncrementalEchelon ech(a.field, a.ncols);
    for (const auto& row : a.rows) {
        if (ech.rank() == a.ncols) break;
        ech.add_row(row);
    }
    return ech;
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

}  // namespace

EliminationResult eliminate(const SparseMatrix& a) { return echelon_of(a).result(); }

int rank(const SparseMatrix& a) { return echelon_of(a).rank(); }

int nullity(const SparseMatrix& a) { return a.ncols - rank(a); }

KernelSummary kernel(const SparseMatrix& a) { return echelon_of(a).kernel(); }

std::vector<Elem> sample_kernel(const KernelSummary& summary, int ncols, const Field& field, Rng& rng) {
    std::vector<Elem> x(static_cast<std::size_t>(ncols));
    for (const auto& b : summary.basis) {
        const Elem c{static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(field.q())))};
        if (c.is_zero()) continue;
        for (int k = 0; k < ncols; ++k) {
            if (!b[k].is_zero()) x[k] = field.add(x[k], field.mul(c, b[k]));
        }
    }
    return x;
}

std::vector<Elem> sample_kernel(const SparseMatrix& a, Rng& rng) {
    return sample_kernel(kernel(a), a.ncols, *a.field, rng);
}

std::vector<Elem> multiply(const SparseMatrix& a, std::span<const Elem> x) {
    if (static_cast<int>(x.size()) != a.ncols) throw Error(ErrorCode::LengthMismatch, "vector length mismatch");
    const Field& f = *a.field;
    std::vector<Elem> y(static_cast<std::size_t>(a.nrows));
    for (int i = 0; i < a.nrows; ++i) {
        Elem acc = Field::zero();
        for (const Entry& e : a.rows[i]) acc = f.add(acc, f.mul(e.coef, x[e.col]));
        y[i] = acc;
    }
    return y;
}

std::map<std::uint16_t, long long> rho(std::span<const Elem> sigma, std::span<const int> dvec) {
    if (sigma.size() != dvec.size()) throw Error(ErrorCode::LengthMismatch, "sigma and dvec differ in length");
    std::map<std::uint16_t, long long> out;
    for (std::size_t i = 0; i < sigma.size(); ++i) out[sigma[i].v] += dvec[i];
    return out;
}

std::string_view to_string(RowRankVerdict v) {
    switch (v) {
        case RowRankVerdict::Full: return "full";
        case RowRankVerdict::NotFull: return "not_full";
        case RowRankVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

RowRankReport rational_full_row_rank(const SparseMatrix& b01, int prime_budget, int f_d) {
    if (prime_budget < 1) throw Error(ErrorCode::BadParameter, "prime_budget must be positive");
    if (f_d < 1) throw Error(ErrorCode::BadParameter, "f_d must be positive");
    RowRankReport report;
    report.nrows = b01.nrows;
    int p = 1;
    while (static_cast<int>(report.witnesses.size()) < prime_budget) {
        do {
            ++p;
        } while (!is_prime(p) || std::gcd(p, f_d) != 1);
        if (p > Field::kMaxOrder) break;
        SparseMatrix mod_p = b01;
        mod_p.field = Field::make(p);
        for (auto& row : mod_p.rows) {
            for (Entry& e : row) e.coef = Field::one();
        }
        const int r = rank(mod_p);
        report.witnesses.push_back({p, r});
        if (r == b01.nrows) {
            report.verdict = RowRankVerdict::Full;
            return report;
        }
    }
    report.verdict = report.witnesses.empty() ? RowRankVerdict::Inconclusive : RowRankVerdict::NotFull;
    return report;
}

}  // namespace sparse_rank
