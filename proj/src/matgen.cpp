#include "sparse_rank/matgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sparse_rank/error.hpp"

namespace sparse_rank {

namespace {

long long sum_of(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0LL); }

std::vector<int> clone_owners(const std::vector<int>& degrees) {
    std::vector<int> owners;
    owners.reserve(static_cast<std::size_t>(sum_of(degrees)));
    for (int j = 0; j < static_cast<int>(degrees.size()); ++j) owners.insert(owners.end(), degrees[j], j);
    return owners;
}

// Per-row variable lists of one uniform matching, drawn row by row as a lazy
// Fisher-Yates shuffle of the variable clones. With stop_on_repeat the draw
// aborts as soon as a row meets the same variable twice.
bool draw_matching(const DegreeSequencePair& degs, Rng& rng, bool stop_on_repeat,
                   std::vector<std::vector<int>>& rows, std::vector<int>& pool) {
    pool = clone_owners(degs.dvec);
    std::size_t next = 0;
    rows.assign(static_cast<std::size_t>(degs.m), {});
    for (int i = 0; i < degs.m; ++i) {
        auto& row = rows[i];
        row.reserve(static_cast<std::size_t>(degs.kvec[i]));
        for (int c = 0; c < degs.kvec[i]; ++c) {
            const std::size_t pick = next + rng.below(pool.size() - next);
            std::swap(pool[next], pool[pick]);
            const int var = pool[next++];
            if (stop_on_repeat && std::find(row.begin(), row.end(), var) != row.end()) return false;
            row.push_back(var);
        }
        std::sort(row.begin(), row.end());
    }
    return true;
}

SparseMatrix empty_matrix(int nrows, int ncols, FieldPtr field) {
    SparseMatrix a;
    a.nrows = nrows;
    a.ncols = ncols;
    a.rows.resize(static_cast<std::size_t>(nrows));
    a.field = std::move(field);
    return a;
}

}  // namespace

void SparseMatrix::validate() const {
    if (!field) throw Error(ErrorCode::BadInput, "matrix has no field");
    if (nrows < 0 || ncols < 0 || rows.size() != static_cast<std::size_t>(nrows)) {
        throw Error(ErrorCode::BadInput, "row count mismatch");
    }
    for (const auto& row : rows) {
        int last = -1;
        for (const Entry& e : row) {
            if (e.col <= last || e.col >= ncols) throw Error(ErrorCode::BadInput, "column index out of order or range");
            if (e.coef.is_zero() || e.coef.v >= field->q()) throw Error(ErrorCode::BadInput, "bad stored coefficient");
            last = e.col;
        }
    }
}

std::size_t SparseMatrix::nnz() const noexcept {
    std::size_t total = 0;
    for (const auto& row : rows) total += row.size();
    return total;
}

bool SparseMatrix::operator==(const SparseMatrix& other) const {
    return nrows == other.nrows && ncols == other.ncols && rows == other.rows &&
           (field == other.field || (field && other.field && field->q() == other.field->q()));
}

void check_degrees(const DegreeSequencePair& degs) {
    if (degs.n != static_cast<int>(degs.dvec.size()) || degs.m != static_cast<int>(degs.kvec.size())) {
        throw Error(ErrorCode::BadParameter, "degree sequence lengths do not match n, m");
    }
    if (sum_of(degs.dvec) != sum_of(degs.kvec)) throw Error(ErrorCode::BadParameter, "degree sums differ");
    for (int d : degs.dvec) {
        if (d < 0) throw Error(ErrorCode::BadParameter, "negative variable degree");
    }
    for (int k : degs.kvec) {
        if (k < 3) throw Error(ErrorCode::BadParameter, "check degree below 3");
    }
}

DegreeSequencePair sample_degrees(const ModelSpec& spec, int n, Rng& rng, long long max_tries,
                                  bool require_divisible) {
    if (n < 1) throw Error(ErrorCode::BadParameter, "n must be positive");
    const int fk = spec.kdist().gcd_support();
    if (require_divisible && n % fk != 0) {
        throw Error(ErrorCode::BadParameter, "n = " + std::to_string(n) + " is not divisible by " + std::to_string(fk));
    }
    if (max_tries < 0) throw Error(ErrorCode::BadParameter, "max_tries must be positive");
    if (max_tries == 0) max_tries = static_cast<long long>(std::ceil(200.0 * std::sqrt(n)));

    const double mean_m = spec.ddist().mean() * n / spec.kdist().mean();
    DegreeSequencePair out;
    out.n = n;
    out.dvec.resize(static_cast<std::size_t>(n));
    for (long long attempt = 0; attempt < max_tries; ++attempt) {
        long long sd = 0;
        for (int& d : out.dvec) {
            d = spec.ddist().sample(rng);
            sd += d;
        }
        const long long m = rng.poisson(mean_m);
        out.kvec.resize(static_cast<std::size_t>(m));
        long long sk = 0;
        for (int& k : out.kvec) {
            k = spec.kdist().sample(rng);
            sk += k;
        }
        if (sd == sk) {
            out.m = static_cast<int>(m);
            return out;
        }
    }
    throw Error(ErrorCode::RetriesExhausted,
                "no degree sequence with matching sums after " + std::to_string(max_tries) + " tries");
}

SparseMatrix gen_pairing(const ModelSpec& spec, const DegreeSequencePair& degs, Rng& rng) {
    check_degrees(degs);
    const Field& f = spec.field();
    std::vector<std::vector<int>> rows;
    std::vector<int> pool;
    draw_matching(degs, rng, false, rows, pool);

    SparseMatrix a = empty_matrix(degs.m, degs.n, spec.field_ptr());
    for (int i = 0; i < degs.m; ++i) {
        const auto& vars = rows[i];
        for (std::size_t s = 0; s < vars.size();) {
            std::size_t e = s;
            while (e < vars.size() && vars[e] == vars[s]) ++e;
            const Elem chi = spec.sample_chi(rng);
            const Elem coef = f.mul(chi, f.from_int(static_cast<long long>(e - s)));
            if (!coef.is_zero()) a.rows[i].push_back({vars[s], coef});
            s = e;
        }
    }
    return a;
}

SparseMatrix gen_simple(const ModelSpec& spec, const DegreeSequencePair& degs, Rng& rng, long long max_tries) {
    check_degrees(degs);
    if (max_tries < 1) throw Error(ErrorCode::BadParameter, "max_tries must be positive");
    std::vector<std::vector<int>> rows;
    std::vector<int> pool;
    for (long long attempt = 0; attempt < max_tries; ++attempt) {
        if (!draw_matching(degs, rng, true, rows, pool)) continue;
        SparseMatrix a = empty_matrix(degs.m, degs.n, spec.field_ptr());
        for (int i = 0; i < degs.m; ++i) {
            for (int var : rows[i]) a.rows[i].push_back({var, spec.sample_chi(rng)});
        }
        return a;
    }
    throw Error(ErrorCode::RetriesExhausted, "no simple graph after " + std::to_string(max_tries) + " matchings");
}

SparseMatrix gen_biadjacency(const DegreeSequencePair& degs, Rng& rng, bool simple, FieldPtr field,
                             long long max_tries) {
    check_degrees(degs);
    if (!field) throw Error(ErrorCode::BadParameter, "biadjacency needs a field");
    if (max_tries < 1) throw Error(ErrorCode::BadParameter, "max_tries must be positive");
    std::vector<std::vector<int>> rows;
    std::vector<int> pool;
    long long attempt = 0;
    while (!draw_matching(degs, rng, simple, rows, pool)) {
        if (++attempt >= max_tries) {
            throw Error(ErrorCode::RetriesExhausted, "no simple graph after " + std::to_string(max_tries) + " matchings");
        }
    }
    SparseMatrix a = empty_matrix(degs.m, degs.n, std::move(field));
    for (int i = 0; i < degs.m; ++i) {
        auto& vars = rows[i];
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        for (int var : vars) a.rows[i].push_back({var, Field::one()});
    }
    return a;
}

SparseMatrix add_ternary_rows(const SparseMatrix& a, int t, Rng& rng, const ModelSpec& spec) {
    if (t < 0) throw Error(ErrorCode::BadParameter, "t must be non-negative");
    if (a.ncols < 3) throw Error(ErrorCode::BadParameter, "ternary rows need at least 3 columns");
    if (a.field->q() != spec.q()) throw Error(ErrorCode::BadParameter, "field mismatch");
    const Field& f = *a.field;
    SparseMatrix out = a;
    out.rows.reserve(out.rows.size() + static_cast<std::size_t>(t));
    for (int r = 0; r < t; ++r) {
        std::map<int, Elem> acc;
        for (int s = 0; s < 3; ++s) {
            const int col = static_cast<int>(rng.below(static_cast<std::uint64_t>(a.ncols)));
            const Elem chi = spec.sample_chi(rng);
            auto [it, inserted] = acc.try_emplace(col, chi);
            if (!inserted) it->second = f.add(it->second, chi);
        }
        std::vector<Entry> row;
        for (const auto& [col, coef] : acc) {
            if (!coef.is_zero()) row.push_back({col, coef});
        }
        out.rows.push_back(std::move(row));
    }
    out.nrows += t;
    return out;
}

SparseMatrix pin(const SparseMatrix& a, int theta, Rng& rng) {
    if (theta < 0) throw Error(ErrorCode::BadParameter, "theta must be non-negative");
    if (theta > 0 && a.ncols < 1) throw Error(ErrorCode::BadParameter, "cannot pin a matrix without columns");
    SparseMatrix out = a;
    for (int r = 0; r < theta; ++r) {
        const int col = static_cast<int>(rng.below(static_cast<std::uint64_t>(a.ncols)));
        out.rows.push_back({{col, Field::one()}});
    }
    out.nrows += theta;
    return out;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a, const MatrixMarketInfo& info) {
    out << "%%MatrixMarket matrix coordinate integer general\n";
    out << "% sparse-rank q=" << a.field->q() << " seed=" << info.seed << " model=" << info.model
        << " sum_d=" << info.sum_d << " sum_k=" << info.sum_k << "\n";
    out << a.nrows << " " << a.ncols << " " << a.nnz() << "\n";
    for (int i = 0; i < a.nrows; ++i) {
        for (const Entry& e : a.rows[i]) out << (i + 1) << " " << (e.col + 1) << " " << e.coef.v << "\n";
    }
}

SparseMatrix read_matrix_market(std::istream& in, FieldPtr field) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
        throw Error(ErrorCode::BadInput, "missing MatrixMarket banner");
    }
    if (line.find("coordinate") == std::string::npos) {
        throw Error(ErrorCode::BadInput, "only coordinate format is supported");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] != '%') break;
        const auto pos = line.find(" q=");
        if (!field && pos != std::string::npos) field = Field::make(std::stoi(line.substr(pos + 3)));
    }
    if (!field) throw Error(ErrorCode::BadInput, "field order not given and not recorded in the header");

    long long nrows = 0, ncols = 0, nnz = 0;
    if (!(std::istringstream(line) >> nrows >> ncols >> nnz) || nrows < 0 || ncols < 0 || nnz < 0) {
        throw Error(ErrorCode::BadInput, "bad size line");
    }
    std::vector<std::vector<std::pair<int, long long>>> raw(static_cast<std::size_t>(nrows));
    for (long long k = 0; k < nnz; ++k) {
        long long i = 0, j = 0, v = 0;
        if (!(in >> i >> j >> v)) throw Error(ErrorCode::BadInput, "truncated entry list");
        if (i < 1 || i > nrows || j < 1 || j > ncols) throw Error(ErrorCode::BadInput, "entry index out of range");
        if (v < 0 || v >= field->q()) throw Error(ErrorCode::BadInput, "entry value is not an element code");
        raw[i - 1].emplace_back(static_cast<int>(j - 1), v);
    }
    SparseMatrix a = empty_matrix(static_cast<int>(nrows), static_cast<int>(ncols), field);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& row = raw[i];
        std::sort(row.begin(), row.end());
        for (std::size_t s = 0; s < row.size();) {
            Elem acc = Field::zero();
            std::size_t e = s;
            for (; e < row.size() && row[e].first == row[s].first; ++e) {
                acc = field->add(acc, Elem{static_cast<std::uint16_t>(row[e].second)});
            }
            if (!acc.is_zero()) a.rows[i].push_back({row[s].first, acc});
            s = e;
        }
    }
    return a;
}

}  // namespace sparse_rank
