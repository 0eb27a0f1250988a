#include "zps/witness.hpp"

#include <cmath>
#include <stdexcept>

namespace zps {
namespace {

// Inputs with |Q_in| below this band are treated as Poissonian: no
// directional transformability prediction is made.
constexpr double kPoissonianBand = 1e-10;

// Slack absorbing rounding in K ≈ 1 for Poissonian states.
constexpr double kMagnitudeSlack = 1e-10;

}  // namespace

ClassicalBoundsCheck check_classical_bounds(const PhotonNumberDistribution& dist, double r_stop,
                                            const ExtremaOptions& opts) {
    if (!(r_stop > 0.0 && r_stop < 1.0)) {
        throw std::invalid_argument("r_stop must lie in (0, 1)");
    }
    ClassicalBoundsCheck check;
    for (std::size_t i = 1; i <= opts.grid_points; ++i) {
        const double r = r_stop * double(i) / double(opts.grid_points);
        if (!check.slope_violation && dk_dr_sign(dist, r) > 0) {
            check.slope_violation = true;
            check.slope_witness_r = r;
        }
        if (!check.magnitude_violation && k_of_r(dist, r) > 1.0 + kMagnitudeSlack) {
            check.magnitude_violation = true;
            check.magnitude_witness_r = r;
        }
        if (check.slope_violation && check.magnitude_violation) {
            break;
        }
    }
    return check;
}

bool lee(const PhotonNumberDistribution& dist, double p0_epsilon) {
    return dist[0] <= p0_epsilon;
}

bool klyshko(const PhotonNumberDistribution& dist) {
    return 2.0 * dist[0] * dist[2] < dist[1] * dist[1];
}

TransformabilityReport predict_transformable(const PhotonNumberDistribution& dist) {
    TransformabilityReport report;
    const Moments m = moments(dist);
    if (!m.mandel_q) {
        throw std::invalid_argument("transformability undefined for a zero-mean state");
    }
    report.q_in = *m.mandel_q;
    report.initially_sub = report.q_in < -kPoissonianBand;
    report.lee = lee(dist);
    report.limit_k = k_limit_r1(dist);
    report.limit_dkdr = dkdr_limit_r1(dist);

    const double p0 = dist[0];
    const double p1 = dist[1];
    const double p2 = dist[2];
    if (report.q_in > kPoissonianBand) {
        report.mean_ratio = p0 * m.mean < p1;
        report.klyshko = 2.0 * p0 * p2 < p1 * p1;
        report.predicted_transformable = report.lee || report.mean_ratio || report.klyshko;
    } else if (report.initially_sub) {
        // Reversed inequalities; Lee's criterion carries no prediction here.
        report.mean_ratio = p0 * m.mean > p1;
        report.klyshko = 2.0 * p0 * p2 > p1 * p1;
        report.predicted_transformable = report.mean_ratio || report.klyshko;
    } else {
        report.mean_ratio = p0 * m.mean < p1;
        report.klyshko = 2.0 * p0 * p2 < p1 * p1;
        report.predicted_transformable = false;
    }
    return report;
}

TransformabilityReport classify(const PhotonNumberDistribution& dist, double r_stop,
                                const ExtremaOptions& opts) {
    TransformabilityReport report = predict_transformable(dist);
    report.observed_extrema = find_extrema(dist, r_stop, opts);
    if (report.predicted_transformable && report.observed_extrema.empty() && r_stop >= 0.99) {
        ExtremaOptions dense = opts;
        dense.grid_points *= 4;
        report.observed_extrema = find_extrema(dist, r_stop, dense);
        if (report.observed_extrema.empty()) {
            throw std::logic_error(
                "transformability prediction not confirmed by the extrema scan");
        }
    }
    const ClassicalBoundsCheck bounds = check_classical_bounds(dist, r_stop, opts);
    report.nonclassical_by_slope = bounds.slope_violation;
    report.nonclassical_by_magnitude = bounds.magnitude_violation;
    return report;
}

}  // namespace zps
