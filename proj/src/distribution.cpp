#include "zps/distribution.hpp"

#include <stdexcept>

namespace zps {

PhotonNumberDistribution::PhotonNumberDistribution(std::vector<double> probs, double tail_bound)
    : probs_(std::move(probs)), tail_bound_(tail_bound) {
    if (probs_.empty()) {
        throw std::invalid_argument("photon-number distribution must have at least one entry");
    }
    if (tail_bound_ < 0.0) {
        throw std::invalid_argument("tail bound must be non-negative");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (p < 0.0) {
            throw std::invalid_argument("photon-number probabilities must be non-negative");
        }
        sum += p;
    }
    if (sum <= 0.0) {
        throw std::invalid_argument("photon-number distribution has zero total mass");
    }
    for (double& p : probs_) {
        p /= sum;
    }
}

}  // namespace zps
