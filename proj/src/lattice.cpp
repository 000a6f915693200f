#include "sparse_rank/lattice.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <limits>
#include <numeric>
#include <optional>
#include <set>

#include "sparse_rank/error.hpp"

namespace sparse_rank {

namespace {

long long checked_mul(long long a, long long b) {
    long long r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::TooLarge, "integer overflow in lattice arithmetic");
    return r;
}

long long checked_add(long long a, long long b) {
    long long r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::TooLarge, "integer overflow in lattice arithmetic");
    return r;
}

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// x a + y b = g >= 0
long long ext_gcd(long long a, long long b, long long& x, long long& y) {
    long long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        const long long q = a / b;
        std::tie(a, b) = std::make_pair(b, a - q * b);
        std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
        std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

// out = s * u + t * v
IntVec combine(long long s, const IntVec& u, long long t, const IntVec& v) {
    IntVec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = checked_add(checked_mul(s, u[i]), checked_mul(t, v[i]));
    return out;
}

class HnfBuilder {
public:
    explicit HnfBuilder(int dim) : dim_(dim), rows_(static_cast<std::size_t>(dim)) {}

    void insert(IntVec v) {
        for (int c = 0; c < dim_; ++c) {
            if (v[c] == 0) continue;
            auto& h = rows_[c];
            if (!h) {
                if (v[c] < 0) {
                    for (auto& x : v) x = -x;
                }
                h = std::move(v);
                reduce();
                return;
            }
            const long long a = (*h)[c];
            const long long b = v[c];
            if (b % a == 0) {
                v = combine(1, v, -(b / a), *h);
                continue;
            }
            long long x = 0, y = 0;
            const long long g = ext_gcd(a, b, x, y);
            IntVec new_h = combine(x, *h, y, v);
            v = combine(a / g, v, -(b / g), *h);
            h = std::move(new_h);
            reduce();
        }
    }

    Hnf finish() const {
        Hnf out;
        out.dim = dim_;
        long long det = 1;
        for (int c = 0; c < dim_; ++c) {
            if (!rows_[c]) {
                det = 0;
                continue;
            }
            out.basis.push_back(*rows_[c]);
            out.pivot_rows.push_back(c);
            if (det != 0) det = checked_mul(det, (*rows_[c])[c]);
        }
        out.det_abs = det;
        return out;
    }

private:
    void reduce() {
        for (int c = 0; c < dim_; ++c) {
            if (!rows_[c]) continue;
            const IntVec& pivot_row = *rows_[c];
            const long long piv = pivot_row[c];
            for (int r = 0; r < c; ++r) {
                if (!rows_[r]) continue;
                IntVec& row = *rows_[r];
                const long long q = floor_div(row[c], piv);
                if (q != 0) row = combine(1, row, -q, pivot_row);
            }
        }
    }

    int dim_;
    std::vector<std::optional<IntVec>> rows_;
};

bool all_equal(std::span<const Elem> coeffs) {
    return std::all_of(coeffs.begin(), coeffs.end(), [&](Elem c) { return c == coeffs.front(); });
}

IntVec unit_vector(int dim, int pos, long long scale = 1) {
    IntVec v(static_cast<std::size_t>(dim), 0);
    v[pos] = scale;
    return v;
}

}  // namespace

void for_each_solution(const Field& field, std::span<const Elem> coeffs,
                       const std::function<void(std::span<const Elem>)>& visit) {
    const int k0 = static_cast<int>(coeffs.size());
    if (k0 < 1) throw Error(ErrorCode::BadParameter, "need at least one coefficient");
    for (Elem c : coeffs) {
        if (c.is_zero() || c.v >= field.q()) throw Error(ErrorCode::BadParameter, "coefficients must be units");
    }
    const int q = field.q();
    long long total = 1;
    for (int i = 0; i < k0; ++i) {
        total *= q;
        if (total > kSolutionCap) {
            throw Error(ErrorCode::TooLarge, "q^k0 exceeds the enumeration cap " + std::to_string(kSolutionCap));
        }
    }
    const Elem lead = field.neg(field.inv(coeffs[0]));
    std::vector<Elem> sigma(static_cast<std::size_t>(k0));
    while (true) {
        Elem acc = Field::zero();
        for (int i = 1; i < k0; ++i) acc = field.add(acc, field.mul(coeffs[i], sigma[i]));
        sigma[0] = field.mul(lead, acc);
        visit(sigma);
        int i = 1;
        while (i < k0 && sigma[i].v == q - 1) sigma[i++] = Field::zero();
        if (i == k0) break;
        ++sigma[i].v;
    }
}

SolutionSet solutions(FieldPtr field, std::span<const Elem> coeffs) {
    SolutionSet out;
    out.field = field;
    out.coeffs.assign(coeffs.begin(), coeffs.end());
    for_each_solution(*field, coeffs, [&](std::span<const Elem> s) { out.sols.emplace_back(s.begin(), s.end()); });
    return out;
}

IntVec freq_vector(const Field& field, std::span<const Elem> sigma) {
    IntVec v(static_cast<std::size_t>(field.q() - 1), 0);
    for (Elem s : sigma) {
        if (!s.is_zero()) ++v[field.index_of(s) - 1];
    }
    return v;
}

Hnf hnf(std::span<const IntVec> generators, int dim) {
    if (dim < 0) throw Error(ErrorCode::BadParameter, "negative dimension");
    HnfBuilder builder(dim);
    for (const IntVec& g : generators) {
        if (static_cast<int>(g.size()) != dim) throw Error(ErrorCode::LengthMismatch, "generator dimension mismatch");
        builder.insert(g);
    }
    return builder.finish();
}

long long det_bareiss(std::span<const IntVec> columns) {
    using boost::multiprecision::cpp_int;
    const std::size_t n = columns.size();
    if (n == 0) return 1;
    std::vector<std::vector<cpp_int>> m(n, std::vector<cpp_int>(n));
    for (std::size_t j = 0; j < n; ++j) {
        if (columns[j].size() != n) throw Error(ErrorCode::LengthMismatch, "determinant needs a square matrix");
        for (std::size_t i = 0; i < n; ++i) m[i][j] = columns[j][i];
    }
    cpp_int prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(m[k], m[swap_row]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        }
        prev = m[k][k];
    }
    const cpp_int det = abs(m[n - 1][n - 1]);
    if (det > std::numeric_limits<long long>::max()) throw Error(ErrorCode::TooLarge, "determinant exceeds int64");
    return det.convert_to<long long>();
}

Hnf module_bruteforce(const FieldPtr& field, std::span<const Elem> coeffs) {
    std::set<IntVec> distinct;
    for_each_solution(*field, coeffs, [&](std::span<const Elem> s) { distinct.insert(freq_vector(*field, s)); });
    const std::vector<IntVec> gens(distinct.begin(), distinct.end());
    return hnf(gens, field->q() - 1);
}

IdenticalBases basis_identical(const Field& f) {
    const int dim = f.q() - 1;
    const int p = f.p();
    auto idx = [&](Elem e) { return f.index_of(e) - 1; };
    IdenticalBases out;
    for (Elem h : f.units()) {
        const auto a = f.coefficients(h);
        IntVec m = unit_vector(dim, idx(h));
        for (int i = 0; i < f.ell(); ++i) m[idx(f.neg(f.monomial(1, i)))] += a[i];
        out.m_q.vectors.push_back(std::move(m));

        IntVec v = unit_vector(dim, idx(h));
        int r = f.ell() - 1;
        while (a[r] == 0) --r;
        const Elem lead = f.monomial(a[r], r);
        if (f.len(h) >= 2) {
            v[idx(f.neg(lead))] += 1;
            v[idx(f.sub(lead, h))] += 1;
        } else if (p == 2) {
            v[idx(h)] = 2;
        } else if (a[r] <= (p - 1) / 2) {
            v[idx(f.neg(h))] += 1;
        } else {
            const Elem xr = f.monomial(1, r);
            v[idx(f.neg(xr))] += 1;
            v[idx(f.sub(xr, h))] += 1;
        }
        out.a_q.vectors.push_back(std::move(v));
    }
    out.m_q.det_abs = det_bareiss(out.m_q.vectors);
    out.a_q.det_abs = det_bareiss(out.a_q.vectors);
    return out;
}

GeneralBasis basis_general(const Field& f, std::span<const Elem> coeffs) {
    const int k0 = static_cast<int>(coeffs.size());
    if (k0 < 3) throw Error(ErrorCode::BadParameter, "need at least three coefficients");
    for (Elem c : coeffs) {
        if (c.is_zero() || c.v >= f.q()) throw Error(ErrorCode::BadParameter, "coefficients must be units");
    }
    if (all_equal(coeffs)) throw Error(ErrorCode::BadInput, "coefficients are all equal; use basis_identical");

    const Elem one = Field::one();
    const Elem minus_one = f.neg(one);
    auto case_of = [&](Elem c2) {
        if (f.p() == 2 && c2 == one) return 1;
        if (f.p() != 2 && c2 == minus_one) return 2;
        return 3;
    };
    GeneralBasis out;
    for (int want = 1; want <= 3 && out.construction_case == 0; ++want) {
        for (int i1 = 0; i1 < k0 && out.construction_case == 0; ++i1) {
            const Elem scale = f.inv(coeffs[i1]);
            for (int i2 = 0; i2 < k0 && out.construction_case == 0; ++i2) {
                for (int i3 = 0; i3 < k0; ++i3) {
                    if (i1 == i2 || i1 == i3 || i2 == i3) continue;
                    const Elem c2 = f.mul(coeffs[i2], scale);
                    const Elem c3 = f.mul(coeffs[i3], scale);
                    if (c3 == one || case_of(c2) != want) continue;
                    out.construction_case = want;
                    out.chi2 = c2;
                    out.chi3 = c3;
                    break;
                }
            }
        }
    }

    const Elem step = out.construction_case == 3 ? f.neg(f.inv(out.chi2)) : f.inv(out.chi3);
    out.orbit_size = f.order(step);
    const int dim = f.q() - 1;
    auto idx = [&](Elem e) { return f.index_of(e) - 1; };
    std::vector<bool> covered(static_cast<std::size_t>(dim), false);
    for (Elem start : f.units()) {
        if (covered[idx(start)]) continue;
        std::vector<Elem> g{start};
        for (int i = 1; i < out.orbit_size; ++i) g.push_back(f.mul(step, g.back()));
        for (Elem e : g) covered[idx(e)] = true;
        for (int i = 0; i + 1 < out.orbit_size; ++i) {
            IntVec v = unit_vector(dim, idx(g[i]));
            v[idx(g[i + 1])] += 1;
            out.basis.vectors.push_back(std::move(v));
        }
        Elem third;
        switch (out.construction_case) {
            case 1: third = f.add(g[1], g[2]); break;
            case 2: third = f.add(g[0], g[0]); break;
            default: third = f.mul(f.sub(one, out.chi3), g[0]); break;
        }
        IntVec v = unit_vector(dim, idx(g[0]));
        v[idx(g[1])] += 1;
        v[idx(third)] += 1;
        out.basis.vectors.push_back(std::move(v));
    }
    out.basis.det_abs = det_bareiss(out.basis.vectors);
    return out;
}

bool is_solution_frequency(const Field& f, std::span<const Elem> coeffs, const IntVec& v) {
    if (static_cast<int>(v.size()) != f.q() - 1) return false;
    std::vector<Elem> values;
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        if (v[i] < 0) return false;
        for (long long c = 0; c < v[i]; ++c) values.push_back(f.unit_at(i + 1));
        if (values.size() > 64) return false;
    }
    if (all_equal(coeffs)) {
        Elem acc = Field::zero();
        for (Elem s : values) acc = f.add(acc, s);
        return acc.is_zero();
    }
    const std::size_t k0 = coeffs.size();
    if (values.size() > k0) return false;
    std::vector<bool> used(k0, false);
    std::function<bool(std::size_t, Elem)> place = [&](std::size_t next, Elem acc) {
        if (next == values.size()) return acc.is_zero();
        for (std::size_t pos = 0; pos < k0; ++pos) {
            if (used[pos]) continue;
            used[pos] = true;
            const bool hit = place(next + 1, f.add(acc, f.mul(coeffs[pos], values[next])));
            used[pos] = false;
            if (hit) return true;
        }
        return false;
    };
    return place(0, Field::zero());
}

VerifyReport verify_basis(const FieldPtr& field, std::span<const Elem> coeffs, const LatticeBasis& basis) {
    VerifyReport report;
    const int dim = field->q() - 1;
    report.expected_det = all_equal(coeffs) ? field->q() : 1;
    report.vectors_are_solutions = static_cast<int>(basis.vectors.size()) == dim;
    for (const IntVec& v : basis.vectors) {
        if (!is_solution_frequency(*field, coeffs, v)) report.vectors_are_solutions = false;
    }
    const bool square = static_cast<int>(basis.vectors.size()) == dim &&
                        std::all_of(basis.vectors.begin(), basis.vectors.end(),
                                    [&](const IntVec& v) { return static_cast<int>(v.size()) == dim; });
    if (!square) return report;
    report.det_abs = det_bareiss(basis.vectors);
    report.det_matches = report.det_abs == report.expected_det;
    report.hnf_matches = hnf(basis.vectors, dim) == module_bruteforce(field, coeffs);
    return report;
}

IntersectReport intersect_divisible(const Field& field, const LatticeBasis& basis, int f_d, long long max_points) {
    if (f_d < 1) throw Error(ErrorCode::BadParameter, "f_d must be positive");
    if (std::gcd(f_d, field.q()) != 1) {
        throw Error(ErrorCode::NotCoprime, "gcd(" + std::to_string(f_d) + ", " + std::to_string(field.q()) + ") != 1");
    }
    const int n = static_cast<int>(basis.vectors.size());
    const int dim = field.q() - 1;
    long long total = 1;
    for (int j = 0; j < n; ++j) {
        total = checked_mul(total, 2LL * f_d + 1);
        if (total > max_points) throw Error(ErrorCode::TooLarge, "coefficient box too large");
    }

    IntersectReport report;
    std::vector<long long> c(static_cast<std::size_t>(n), -f_d);
    IntVec y(static_cast<std::size_t>(dim), 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < dim; ++i) y[i] -= f_d * basis.vectors[j][i];
    }
    while (true) {
        const bool y_div = std::all_of(y.begin(), y.end(), [&](long long x) { return x % f_d == 0; });
        const bool c_div = std::all_of(c.begin(), c.end(), [&](long long x) { return x % f_d == 0; });
        ++report.points_checked;
        if (y_div) ++report.divisible_points;
        if (y_div != c_div) ++report.violations;

        int j = 0;
        while (j < n && c[j] == f_d) {
            c[j] = -f_d;
            for (int i = 0; i < dim; ++i) y[i] -= 2LL * f_d * basis.vectors[j][i];
            ++j;
        }
        if (j == n) break;
        ++c[j];
        for (int i = 0; i < dim; ++i) y[i] += basis.vectors[j][i];
    }
    report.holds = report.violations == 0;
    return report;
}

}  // namespace sparse_rank
