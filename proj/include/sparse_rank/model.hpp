#pragma once

#include <utility>
#include <vector>

#include "sparse_rank/degdist.hpp"
#include "sparse_rank/gf.hpp"
#include "sparse_rank/rng.hpp"

namespace sparse_rank {

/// Random matrix model: variable degrees d, check degrees k, the field F_q and
/// the law chi of the non-zero entries on F_q^*.
class ModelSpec {
public:
    /// Throws BadParameter unless min supp(k) >= 3, chi is supported on units
    /// and its probabilities sum to 1 within 1e-12.
    ModelSpec(DegreeDist ddist, DegreeDist kdist, FieldPtr field,
              std::vector<std::pair<Elem, double>> chi);

    /// chi uniform on F_q^*.
    static ModelSpec uniform_chi(DegreeDist ddist, DegreeDist kdist, FieldPtr field);
    /// chi = 1 deterministically.
    static ModelSpec unit_chi(DegreeDist ddist, DegreeDist kdist, FieldPtr field);

    const DegreeDist& ddist() const noexcept { return ddist_; }
    const DegreeDist& kdist() const noexcept { return kdist_; }
    const Field& field() const noexcept { return *field_; }
    const FieldPtr& field_ptr() const noexcept { return field_; }
    int q() const noexcept { return field_->q(); }
    const std::vector<std::pair<Elem, double>>& chi() const noexcept { return chi_; }

    Elem sample_chi(Rng& rng) const;

private:
    DegreeDist ddist_;
    DegreeDist kdist_;
    FieldPtr field_;
    std::vector<std::pair<Elem, double>> chi_;
    std::vector<double> chi_cdf_;
};

}  // namespace sparse_rank
