#include "zps/detectors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "zps/engine.hpp"

namespace zps {
namespace {

/// Σ p_n xⁿ, the no-detection generating sum shared by every detector formula.
double generating_sum(const PhotonNumberDistribution& dist, double x) {
    double sum = 0.0;
    double xn = 1.0;
    for (double p : dist.probs()) {
        sum += p * xn;
        xn *= x;
    }
    return sum;
}

void check_unit_range(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
}

void check_not_vacuum(const PhotonNumberDistribution& dist) {
    if (moments(dist).mean <= 0.0) {
        throw std::invalid_argument("operation undefined for a zero-mean (vacuum) state");
    }
}

}  // namespace

double herald_success_prob(const PhotonNumberDistribution& dist, double reflectance, double eta1) {
    check_unit_range(reflectance, "reflectance");
    check_unit_range(eta1, "eta1");
    return generating_sum(dist, 1.0 - reflectance * eta1);
}

double prob_click_out(const PhotonNumberDistribution& dist, double reflectance, double eta2) {
    check_unit_range(reflectance, "reflectance");
    check_unit_range(eta2, "eta2");
    return 1.0 - generating_sum(dist, 1.0 - (1.0 - reflectance) * eta2);
}

double prob_no_click_joint(const PhotonNumberDistribution& dist, double reflectance, double eta1,
                           double eta2) {
    check_unit_range(reflectance, "reflectance");
    check_unit_range(eta1, "eta1");
    check_unit_range(eta2, "eta2");
    return generating_sum(dist, 1.0 - reflectance * eta1 - (1.0 - reflectance) * eta2);
}

double k_exp(const PhotonNumberDistribution& dist, double reflectance, double eta1) {
    check_unit_range(reflectance, "reflectance");
    check_unit_range(eta1, "eta1");
    if (!(reflectance * eta1 < 1.0)) {
        throw std::invalid_argument("effective reflectance R*eta1 must be < 1");
    }
    return k_of_r(dist, reflectance * eta1);
}

KClickValue k_click(const PhotonNumberDistribution& dist, double reflectance,
                    const DetectorModel& model) {
    check_not_vacuum(dist);
    check_unit_range(reflectance, "reflectance");
    check_unit_range(model.eta1, "eta1");
    check_unit_range(model.eta2, "eta2");
    if (model.eta2 == 0.0) {
        return {k_exp(dist, reflectance, model.eta1), true};
    }
    const double p_nc1 = herald_success_prob(dist, reflectance, model.eta1);
    const double p_joint = prob_no_click_joint(dist, reflectance, model.eta1, model.eta2);
    const double p_c2 = prob_click_out(dist, reflectance, model.eta2);
    return {(p_nc1 - p_joint) / (p_nc1 * p_c2), false};
}

double k_dark(const PhotonNumberDistribution& dist, double reflectance,
              const DetectorModel& model) {
    check_not_vacuum(dist);
    if (!(model.dark2 >= 0.0 && model.dark2 < 1.0)) {
        throw std::invalid_argument("dark-count probability must lie in [0, 1)");
    }
    if (model.dark2 == 0.0) {
        return k_click(dist, reflectance, model).value;
    }
    if (model.eta2 == 0.0) {
        // No real clicks at all: the ratio is driven entirely by dark counts.
        return 1.0;
    }
    const double p_nc1 = herald_success_prob(dist, reflectance, model.eta1);
    const double p_joint = prob_no_click_joint(dist, reflectance, model.eta1, model.eta2);
    const double p_c2 = prob_click_out(dist, reflectance, model.eta2);
    const double p_c2_given_nc1 = (p_nc1 - p_joint) / p_nc1;
    const double p_nc2_given_nc1 = p_joint / p_nc1;
    const double p_nc2 = 1.0 - p_c2;
    return (p_c2_given_nc1 + model.dark2 * p_nc2_given_nc1) / (p_c2 + model.dark2 * p_nc2);
}

double k_dark_approx(const PhotonNumberDistribution& dist, double reflectance,
                     const DetectorModel& model) {
    check_not_vacuum(dist);
    if (!(model.dark2 >= 0.0 && model.dark2 < 1.0)) {
        throw std::invalid_argument("dark-count probability must lie in [0, 1)");
    }
    if (model.eta2 == 0.0) {
        return model.dark2 > 0.0 ? 1.0 : k_exp(dist, reflectance, model.eta1);
    }
    const double p_nc1 = herald_success_prob(dist, reflectance, model.eta1);
    const double p_joint = prob_no_click_joint(dist, reflectance, model.eta1, model.eta2);
    const double p_c2 = prob_click_out(dist, reflectance, model.eta2);
    const double p_c2_given_nc1 = (p_nc1 - p_joint) / p_nc1;
    return (p_c2_given_nc1 + model.dark2) / (p_c2 + model.dark2);
}

}  // namespace zps
