#include "sparse_rank/gf.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sparse_rank/error.hpp"

namespace sparse_rank {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotPrimePower: return "NotPrimePower";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::BadParameter: return "BadParameter";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::RetriesExhausted: return "RetriesExhausted";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::BadInput: return "BadInput";
        case ErrorCode::NotCoprime: return "NotCoprime";
        case ErrorCode::BadConfig: return "BadConfig";
    }
    return "Unknown";
}

namespace {

using Poly = std::vector<int>;  // coefficients over F_p, lowest degree first

int mod(long long a, int p) {
    long long r = a % p;
    return static_cast<int>(r < 0 ? r + p : r);
}

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo the monic polynomial m.
Poly poly_rem(Poly a, const Poly& m, int p) {
    trim(a);
    const std::size_t dm = m.size() - 1;
    while (a.size() > dm && !a.empty()) {
        const int lead = a.back();
        const std::size_t shift = a.size() - 1 - dm;
        for (std::size_t i = 0; i <= dm; ++i) {
            a[shift + i] = mod(a[shift + i] - static_cast<long long>(lead) * m[i], p);
        }
        trim(a);
    }
    return a;
}

Poly poly_mul(const Poly& a, const Poly& b, int p) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            c[i + j] = mod(c[i + j] + static_cast<long long>(a[i]) * b[j], p);
        }
    }
    trim(c);
    return c;
}

// Exhaustive trial division by every monic polynomial of degree 1..deg/2.
bool is_irreducible(const Poly& g, int p) {
    const int deg = static_cast<int>(g.size()) - 1;
    for (int d = 1; 2 * d <= deg; ++d) {
        int count = 1;
        for (int i = 0; i < d; ++i) count *= p;
        for (int t = 0; t < count; ++t) {
            Poly f(d + 1, 0);
            f[d] = 1;
            int rest = t;
            for (int i = 0; i < d; ++i) {
                f[i] = rest % p;
                rest /= p;
            }
            if (poly_rem(g, f, p).empty()) return false;
        }
    }
    return true;
}

Poly smallest_irreducible(int p, int ell) {
    int count = 1;
    for (int i = 0; i < ell; ++i) count *= p;
    // Lexicographic in (a_0, ..., a_{l-1}) with a_0 most significant.
    for (int t = 0; t < count; ++t) {
        Poly g(ell + 1, 0);
        g[ell] = 1;
        int rest = t;
        for (int i = ell - 1; i >= 0; --i) {
            g[i] = rest % p;
            rest /= p;
        }
        if (is_irreducible(g, p)) return g;
    }
    throw Error(ErrorCode::Unsupported, "no irreducible polynomial found");
}

}  // namespace

std::shared_ptr<const Field> Field::make(int q) {
    if (q < 2) throw Error(ErrorCode::NotPrimePower, "q = " + std::to_string(q) + " < 2");
    if (q > kMaxOrder) {
        throw Error(ErrorCode::Unsupported, "q = " + std::to_string(q) + " exceeds 1024");
    }
    int p = 2;
    while (q % p != 0) ++p;
    int ell = 0;
    int rest = q;
    while (rest % p == 0) {
        rest /= p;
        ++ell;
    }
    if (rest != 1) {
        throw Error(ErrorCode::NotPrimePower, std::to_string(q) + " is not a prime power");
    }
    return std::shared_ptr<const Field>(new Field(p, ell));
}

Field::Field(int p, int ell) : p_(p), ell_(ell), q_(1) {
    for (int i = 0; i < ell; ++i) q_ *= p;
    modulus_ = smallest_irreducible(p, ell);

    const auto q = static_cast<std::size_t>(q_);
    add_.resize(q * q);
    neg_.resize(q);
    for (int a = 0; a < q_; ++a) {
        const auto ca = poly_of(Elem{static_cast<std::uint16_t>(a)});
        Poly n(ell_);
        for (int i = 0; i < ell_; ++i) n[i] = mod(-static_cast<long long>(i < static_cast<int>(ca.size()) ? ca[i] : 0), p_);
        neg_[a] = elem_of(n).v;
        for (int b = 0; b < q_; ++b) {
            const auto cb = poly_of(Elem{static_cast<std::uint16_t>(b)});
            Poly s(ell_, 0);
            for (int i = 0; i < ell_; ++i) {
                const int x = i < static_cast<int>(ca.size()) ? ca[i] : 0;
                const int y = i < static_cast<int>(cb.size()) ? cb[i] : 0;
                s[i] = (x + y) % p_;
            }
            add_[a * q + b] = elem_of(s).v;
        }
    }

    // Find a generator of F_q^* with schoolbook multiplication.
    exp_.assign(2 * (q - 1), 0);
    log_.assign(q, 0);
    for (int g = 1; g < q_; ++g) {
        const Elem gen{static_cast<std::uint16_t>(g)};
        Elem x = one();
        int ord = 0;
        do {
            x = mul_schoolbook(x, gen);
            ++ord;
        } while (x != one());
        if (ord != q_ - 1) continue;
        x = one();
        for (int i = 0; i < q_ - 1; ++i) {
            exp_[i] = x.v;
            log_[x.v] = static_cast<std::uint16_t>(i);
            x = mul_schoolbook(x, gen);
        }
        for (std::size_t i = q - 1; i < exp_.size(); ++i) exp_[i] = exp_[i - (q - 1)];
        break;
    }

    // Indexing function f.
    index_.assign(q, 0);
    by_index_.assign(q - 1, Elem{});
    std::vector<Elem> long_units;
    for (int c = 1; c < q_; ++c) {
        const Elem e{static_cast<std::uint16_t>(c)};
        if (len(e) >= 2) long_units.push_back(e);
    }
    auto lex_key = [&](Elem e) {
        int key = 0;
        const auto cs = coefficients(e);
        for (int i = 0; i < ell_; ++i) key = key * p_ + cs[i];
        return key;
    };
    std::sort(long_units.begin(), long_units.end(), [&](Elem a, Elem b) {
        const int la = len(a);
        const int lb = len(b);
        if (la != lb) return la > lb;
        return lex_key(a) < lex_key(b);
    });
    int next = 1;
    for (Elem e : long_units) index_[e.v] = next++;
    for (int i = 0; i < ell_; ++i) {
        for (int a = 1; a < p_; ++a) {
            index_[monomial(a, i).v] = q_ - 1 - (ell_ - i) * (p_ - 1) + a;
        }
    }
    for (int c = 1; c < q_; ++c) by_index_[index_[c] - 1] = Elem{static_cast<std::uint16_t>(c)};
}

std::vector<int> Field::poly_of(Elem a) const {
    Poly out(ell_, 0);
    int rest = a.v;
    for (int i = 0; i < ell_; ++i) {
        out[i] = rest % p_;
        rest /= p_;
    }
    trim(out);
    return out;
}

Elem Field::elem_of(const std::vector<int>& poly) const {
    int code = 0;
    for (int i = static_cast<int>(poly.size()) - 1; i >= 0; --i) code = code * p_ + poly[i];
    return Elem{static_cast<std::uint16_t>(code)};
}

Elem Field::inv(Elem a) const {
    if (a.is_zero()) throw Error(ErrorCode::DivisionByZero, "inverse of zero");
    return Elem{exp_[(q_ - 1 - log_[a.v]) % (q_ - 1)]};
}

Elem Field::pow(Elem a, long long e) const {
    if (a.is_zero()) return e == 0 ? one() : zero();
    const long long m = q_ - 1;
    long long r = (static_cast<long long>(log_[a.v]) * (e % m)) % m;
    if (r < 0) r += m;
    return Elem{exp_[r]};
}

Elem Field::mul_schoolbook(Elem a, Elem b) const {
    return elem_of(poly_rem(poly_mul(poly_of(a), poly_of(b), p_), modulus_, p_));
}

Elem Field::from_int(long long n) const noexcept {
    return Elem{static_cast<std::uint16_t>(mod(n, p_))};
}

Elem Field::monomial(int a, int i) const {
    if (a < 0 || a >= p_ || i < 0 || i >= ell_) {
        throw Error(ErrorCode::BadParameter, "monomial coefficient or degree out of range");
    }
    int code = a;
    for (int k = 0; k < i; ++k) code *= p_;
    return Elem{static_cast<std::uint16_t>(code)};
}

std::vector<int> Field::coefficients(Elem a) const {
    std::vector<int> out(ell_, 0);
    int rest = a.v;
    for (int i = 0; i < ell_; ++i) {
        out[i] = rest % p_;
        rest /= p_;
    }
    return out;
}

Elem Field::from_coefficients(std::span<const int> coeffs) const {
    if (static_cast<int>(coeffs.size()) > ell_) {
        throw Error(ErrorCode::BadParameter, "too many coefficients for F_q");
    }
    Poly poly(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) poly[i] = mod(coeffs[i], p_);
    return elem_of(poly);
}

int Field::order(Elem a) const {
    if (a.is_zero()) throw Error(ErrorCode::DivisionByZero, "order of zero");
    return (q_ - 1) / std::gcd(q_ - 1, static_cast<int>(log_[a.v]));
}

int Field::len(Elem a) const noexcept {
    int n = 0;
    for (int rest = a.v; rest > 0; rest /= p_) n += (rest % p_) != 0;
    return n;
}

int Field::index_of(Elem unit) const {
    if (unit.is_zero() || unit.v >= q_) throw Error(ErrorCode::BadParameter, "index_of expects a unit");
    return index_[unit.v];
}

Elem Field::unit_at(int index) const {
    if (index < 1 || index >= q_) throw Error(ErrorCode::BadParameter, "index out of range");
    return by_index_[index - 1];
}

}  // namespace sparse_rank
