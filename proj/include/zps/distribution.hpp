#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace zps {

/// Truncated, normalized photon-number distribution {p_n}, n = 0..n_max.
/// Every quantity in this toolkit depends on the Fock-basis diagonal only,
/// so this type is the common currency between all modules.
class PhotonNumberDistribution {
public:
    /// Takes ownership of `probs`, normalizes them to unit sum and records
    /// `tail_bound`, an upper estimate of the probability mass lost to
    /// truncation. Throws std::invalid_argument on a negative entry or a
    /// non-positive total.
    PhotonNumberDistribution(std::vector<double> probs, double tail_bound);

    /// p_n; zero beyond the truncation bound.
    double operator[](std::size_t n) const noexcept {
        return n < probs_.size() ? probs_[n] : 0.0;
    }

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t n_max() const noexcept { return probs_.size() - 1; }
    double tail_bound() const noexcept { return tail_bound_; }

private:
    std::vector<double> probs_;
    double tail_bound_ = 0.0;
};

}  // namespace zps
