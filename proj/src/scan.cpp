#include "zps/scan.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "zps/engine.hpp"
#include "zps/witness.hpp"

namespace zps {
namespace {

constexpr double kPoissonianBand = 1e-10;

/// Derivative-free extrema scan for a smooth closed-form curve: slope signs
/// from central differences on a coarse grid, sign flips refined by
/// bisection. The deadband keeps rounding noise in flat curves (coherent
/// limits, K ≡ 1) from registering as extrema.
template <typename KFn>
std::vector<Extremum> extrema_of_curve(KFn&& k, double r_stop, std::size_t grid_points = 512,
                                       double refine_tol = 1e-8) {
    constexpr double h = 1e-7;
    auto slope_sign = [&](double r) -> int {
        const double hi = k(r + h);
        const double lo = k(r - h);
        const double delta = hi - lo;
        const double scale = std::max({std::abs(hi), std::abs(lo), 1.0});
        if (std::abs(delta) <= 4e-15 * scale) {
            return 0;
        }
        return delta > 0.0 ? 1 : -1;
    };

    std::vector<Extremum> extrema;
    double last_r = 0.0;
    int last_sign = 0;
    for (std::size_t i = 1; i <= grid_points; ++i) {
        const double r = r_stop * double(i) / double(grid_points);
        const int sign = slope_sign(r);
        if (sign == 0) {
            continue;
        }
        if (last_sign != 0 && sign != last_sign) {
            double lo = last_r;
            double hi = r;
            while (hi - lo > refine_tol) {
                const double mid = 0.5 * (lo + hi);
                const int mid_sign = slope_sign(mid);
                if (mid_sign == 0) {
                    lo = hi = mid;
                    break;
                }
                (mid_sign == last_sign ? lo : hi) = mid;
            }
            const double r_star = 0.5 * (lo + hi);
            extrema.push_back({r_star,
                               sign > 0 ? Extremum::Kind::minimum : Extremum::Kind::maximum,
                               k(r_star)});
        }
        last_sign = sign;
        last_r = r;
    }
    return extrema;
}

StateSpec cell_spec(StateFamily family, double v1, double v2) {
    if (family == StateFamily::dsq) {
        return DsqSpec{v1, v2};
    }
    return CcsSpec{v1, v2};
}

/// Closed-form K for the cell; the dsq r = 0 row degenerates to a coherent
/// state where K ≡ 1.
double cell_k(StateFamily family, double v1, double v2, double r) {
    if (family == StateFamily::dsq) {
        return v2 == 0.0 ? 1.0 : closed_form_k_dsq(v1, v2, r);
    }
    return closed_form_k_ccs(v1, v2, r);
}

CellClass classify_cell(StateFamily family, double v1, double v2, const ScanOptions& opts) {
    CellClass cell;
    try {
        const PhotonNumberDistribution dist = build_state(cell_spec(family, v1, v2), opts.truncation);
        const Moments m = moments(dist);
        if (!m.mandel_q) {
            cell.error = "zero-mean state";
            return cell;
        }
        cell.q_sign = *m.mandel_q > kPoissonianBand    ? QSign::super
                      : *m.mandel_q < -kPoissonianBand ? QSign::sub
                                                       : QSign::poissonian;
        cell.klyshko = klyshko(dist);
        if (!(family == StateFamily::dsq && v2 == 0.0)) {
            const auto extrema =
                extrema_of_curve([&](double r) { return cell_k(family, v1, v2, r); }, opts.r_stop);
            for (const Extremum& e : extrema) {
                if (e.r_star > opts.r_stop - opts.edge_margin) {
                    continue;  // edge artifact next to the divergence at R = 1
                }
                (e.kind == Extremum::Kind::minimum ? cell.has_min : cell.has_max) = true;
            }
        }
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

}  // namespace

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("grid needs at least one point");
    }
    std::vector<double> grid;
    grid.reserve(n);
    if (n == 1) {
        grid.push_back(lo);
        return grid;
    }
    for (std::size_t i = 0; i < n; ++i) {
        grid.push_back(lo + (hi - lo) * double(i) / double(n - 1));
    }
    return grid;
}

RegionScan scan_family(StateFamily family, std::vector<double> grid1, std::vector<double> grid2,
                       const ScanOptions& opts) {
    for (const auto* grid : {&grid1, &grid2}) {
        if (grid->empty()) {
            throw std::invalid_argument("scan grids must be non-empty");
        }
        for (std::size_t i = 1; i < grid->size(); ++i) {
            if (!((*grid)[i] > (*grid)[i - 1])) {
                throw std::invalid_argument("scan grids must be strictly increasing");
            }
        }
    }
    if (!(opts.r_stop > 0.0 && opts.r_stop < 1.0)) {
        throw std::invalid_argument("r_stop must lie in (0, 1)");
    }

    RegionScan scan;
    scan.family = family;
    scan.axis1 = family == StateFamily::dsq ? "z" : "lambda";
    scan.axis2 = family == StateFamily::dsq ? "r" : "alpha";
    scan.grid1 = std::move(grid1);
    scan.grid2 = std::move(grid2);
    scan.cells.reserve(scan.grid1.size() * scan.grid2.size());

    std::mt19937_64 rng(opts.cross_check_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double v1 : scan.grid1) {
        for (double v2 : scan.grid2) {
            CellClass cell = classify_cell(family, v1, v2, opts);
            const bool check = unit(rng) < opts.cross_check_fraction;
            if (check && cell.error.empty()) {
                const PhotonNumberDistribution dist =
                    build_state(cell_spec(family, v1, v2), opts.truncation);
                for (double r : {0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 0.95}) {
                    const double closed = cell_k(family, v1, v2, r);
                    const double generic = k_of_r(dist, r);
                    if (std::abs(closed - generic) > opts.cross_check_tol) {
                        throw std::logic_error(
                            "closed-form fast path disagrees with the generic engine");
                    }
                }
            }
            scan.cells.push_back(std::move(cell));
        }
    }
    return scan;
}

BoundaryTrace trace_boundary(StateFamily family, BoundaryCriterion criterion, int axis, double lo,
                             double hi, double fixed_other, const ScanOptions& opts,
                             std::size_t probes) {
    if (axis != 0 && axis != 1) {
        throw std::invalid_argument("axis must be 0 (z/lambda) or 1 (r/alpha)");
    }
    if (!(hi > lo) || probes < 2) {
        throw std::invalid_argument("boundary range must be non-degenerate");
    }

    auto state_at = [&](double v) -> int {
        const double v1 = axis == 0 ? v : fixed_other;
        const double v2 = axis == 0 ? fixed_other : v;
        switch (criterion) {
            case BoundaryCriterion::q_in_zero: {
                const Moments m = moments(build_state(cell_spec(family, v1, v2), opts.truncation));
                if (!m.mandel_q) {
                    throw std::invalid_argument("q_in sign undefined for a zero-mean state");
                }
                return *m.mandel_q > 0.0 ? 1 : 0;
            }
            case BoundaryCriterion::klyshko:
                return klyshko(build_state(cell_spec(family, v1, v2), opts.truncation)) ? 1 : 0;
            case BoundaryCriterion::has_min:
            case BoundaryCriterion::has_max: {
                const CellClass cell = classify_cell(family, v1, v2, opts);
                if (!cell.error.empty()) {
                    throw std::invalid_argument("cell evaluation failed: " + cell.error);
                }
                return (criterion == BoundaryCriterion::has_min ? cell.has_min : cell.has_max) ? 1
                                                                                               : 0;
            }
        }
        return 0;
    };

    BoundaryTrace trace;
    double prev_v = lo;
    int prev_state = state_at(lo);
    for (std::size_t i = 1; i < probes; ++i) {
        const double v = lo + (hi - lo) * double(i) / double(probes - 1);
        const int state = state_at(v);
        if (state != prev_state) {
            double a = prev_v;
            double b = v;
            while (b - a > 1e-6) {
                const double mid = 0.5 * (a + b);
                (state_at(mid) == prev_state ? a : b) = mid;
            }
            trace.points.push_back(0.5 * (a + b));
        }
        prev_state = state;
        prev_v = v;
    }
    if (trace.points.empty()) {
        trace.note = "criterion does not change across the requested range";
    }
    return trace;
}

}  // namespace zps
