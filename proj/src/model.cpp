#include "sparse_rank/model.hpp"

#include <algorithm>
#include <cmath>

#include "sparse_rank/error.hpp"

namespace sparse_rank {

ModelSpec::ModelSpec(DegreeDist ddist, DegreeDist kdist, FieldPtr field,
                     std::vector<std::pair<Elem, double>> chi)
    : ddist_(std::move(ddist)), kdist_(std::move(kdist)), field_(std::move(field)), chi_(std::move(chi)) {
    if (!field_) throw Error(ErrorCode::BadParameter, "model needs a field");
    if (kdist_.min_value() < 3) {
        throw Error(ErrorCode::BadParameter, "check degrees must be at least 3");
    }
    if (chi_.empty()) throw Error(ErrorCode::BadParameter, "coefficient law is empty");
    double total = 0.0;
    for (const auto& [e, prob] : chi_) {
        if (e.is_zero() || e.v >= field_->q()) {
            throw Error(ErrorCode::BadParameter, "coefficient law must be supported on units");
        }
        if (!(prob > 0.0)) throw Error(ErrorCode::BadParameter, "coefficient probabilities must be positive");
        total += prob;
        chi_cdf_.push_back(total);
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw Error(ErrorCode::BadParameter, "coefficient probabilities must sum to 1");
    }
    chi_cdf_.back() = 1.0;
}

ModelSpec ModelSpec::uniform_chi(DegreeDist ddist, DegreeDist kdist, FieldPtr field) {
    std::vector<std::pair<Elem, double>> chi;
    const int q = field->q();
    for (int c = 1; c < q; ++c) chi.emplace_back(Elem{static_cast<std::uint16_t>(c)}, 1.0 / (q - 1));
    return ModelSpec(std::move(ddist), std::move(kdist), std::move(field), std::move(chi));
}

ModelSpec ModelSpec::unit_chi(DegreeDist ddist, DegreeDist kdist, FieldPtr field) {
    return ModelSpec(std::move(ddist), std::move(kdist), std::move(field), {{Field::one(), 1.0}});
}

Elem ModelSpec::sample_chi(Rng& rng) const {
    if (chi_.size() == 1) return chi_.front().first;
    const double u = rng.uniform01();
    const auto it = std::upper_bound(chi_cdf_.begin(), chi_cdf_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - chi_cdf_.begin()), chi_.size() - 1);
    return chi_[idx].first;
}

}  // namespace sparse_rank
