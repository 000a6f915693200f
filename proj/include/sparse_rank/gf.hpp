#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace sparse_rank {

/// Handle for an element of F_q. The code is the integer a_0 + a_1 p + ... +
/// a_{l-1} p^{l-1} read off the polynomial-basis coefficients, so 0 is the zero
/// element and 1 is the unit.
struct Elem {
    std::uint16_t v = 0;

    constexpr bool is_zero() const noexcept { return v == 0; }
    friend constexpr auto operator<=>(Elem, Elem) = default;
};

/// Arithmetic context for F_q with q = p^l <= 1024.
///
/// Elements are polynomials of degree < l over F_p reduced modulo a monic
/// irreducible g. The modulus is the lexicographically smallest irreducible
/// polynomial of degree l, comparing (a_0, ..., a_{l-1}) with a_0 first.
/// Multiplication is defined by schoolbook product and reduction; the
/// exp/log and addition tables built at construction are caches of that
/// definition. Immutable once built.
class Field {
public:
    static constexpr int kMaxOrder = 1024;

    /// Throws NotPrimePower / Unsupported.
    static std::shared_ptr<const Field> make(int q);

    int p() const noexcept { return p_; }
    int ell() const noexcept { return ell_; }
    int q() const noexcept { return q_; }
    /// Coefficients of g, lowest degree first, size l + 1, monic.
    std::span<const int> modulus() const noexcept { return modulus_; }

    static constexpr Elem zero() noexcept { return Elem{0}; }
    static constexpr Elem one() noexcept { return Elem{1}; }

    Elem add(Elem a, Elem b) const noexcept { return Elem{add_[a.v * q_ + b.v]}; }
    Elem neg(Elem a) const noexcept { return Elem{neg_[a.v]}; }
    Elem sub(Elem a, Elem b) const noexcept { return add(a, neg(b)); }
    Elem mul(Elem a, Elem b) const noexcept {
        if (a.is_zero() || b.is_zero()) return zero();
        return Elem{exp_[log_[a.v] + log_[b.v]]};
    }
    /// Throws DivisionByZero on inv(0).
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, long long e) const;

    /// Reference multiplication straight from the definition (polynomial
    /// product, then reduction mod g). Used to build the tables and in tests.
    Elem mul_schoolbook(Elem a, Elem b) const;

    /// Image of the integer n under Z -> F_p -> F_q.
    Elem from_int(long long n) const noexcept;
    /// a * X^i for a in [0, p-1], i in [0, l-1].
    Elem monomial(int a, int i) const;
    std::vector<int> coefficients(Elem a) const;
    Elem from_coefficients(std::span<const int> coeffs) const;
    /// Multiplicative order of a unit.
    int order(Elem a) const;
    Elem primitive() const noexcept { return Elem{exp_[1]}; }

    /// Number of non-zero polynomial coefficients.
    int len(Elem a) const noexcept;

    /// Indexing bijection F_q^* -> {1, ..., q-1}. Longer elements receive
    /// smaller indices; a X^i maps to q-1-(l-i)(p-1)+a; ties among elements of
    /// length >= 2 are broken by ascending lexicographic order of
    /// (a_0, ..., a_{l-1}).
    int index_of(Elem unit) const;
    Elem unit_at(int index) const;
    /// All units in index order (position i holds unit_at(i + 1)).
    std::span<const Elem> units() const noexcept { return by_index_; }

private:
    Field(int p, int ell);

    std::vector<int> poly_of(Elem a) const;
    Elem elem_of(const std::vector<int>& poly) const;

    int p_;
    int ell_;
    int q_;
    std::vector<int> modulus_;
    std::vector<std::uint16_t> add_;
    std::vector<std::uint16_t> neg_;
    std::vector<std::uint16_t> exp_;  // length 2(q-1) so log sums index directly
    std::vector<std::uint16_t> log_;
    std::vector<int> index_;  // code -> f(code), 0 for the zero element
    std::vector<Elem> by_index_;
};

using FieldPtr = std::shared_ptr<const Field>;

}  // namespace sparse_rank
