#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zps/states.hpp"

namespace zps {

enum class StateFamily { dsq, ccs };

enum class QSign { sub, super, poissonian };

struct CellClass {
    QSign q_sign = QSign::poissonian;
    bool has_min = false;
    bool has_max = false;
    bool klyshko = false;
    std::string error;  // non-empty when this cell failed to evaluate
};

/// Classification of a two-parameter state family over a grid.
/// Axis 1 is z (dsq) or lambda (ccs); axis 2 is r (dsq) or alpha (ccs).
struct RegionScan {
    StateFamily family = StateFamily::dsq;
    std::string axis1;
    std::string axis2;
    std::vector<double> grid1;
    std::vector<double> grid2;
    std::vector<CellClass> cells;  // row-major: cells[i1 * grid2.size() + i2]

    const CellClass& at(std::size_t i1, std::size_t i2) const {
        return cells[i1 * grid2.size() + i2];
    }
};

struct ScanOptions {
    double r_stop = 0.999;
    /// Extrema within this distance of r_stop are treated as edge artifacts
    /// and excluded from region membership.
    double edge_margin = 1e-3;
    /// Fraction of cells whose closed-form K curve is re-derived through the
    /// generic distribution pipeline, and the agreement tolerance.
    double cross_check_fraction = 0.01;
    double cross_check_tol = 1e-6;
    std::uint64_t cross_check_seed = 0x5eed;
    Truncation truncation;
};

/// Classify every grid cell: Q_in sign, Klyshko, and the extrema structure of
/// K. Extrema are located on the family's closed-form K (fast path) and
/// cross-checked against the generic engine on a random subsample; per-cell
/// failures are recorded in the cell, not thrown.
RegionScan scan_family(StateFamily family, std::vector<double> grid1, std::vector<double> grid2,
                       const ScanOptions& opts = {});

/// Convenience: n strictly increasing values from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

enum class BoundaryCriterion { q_in_zero, klyshko, has_min, has_max };

struct BoundaryTrace {
    std::vector<double> points;
    std::string note;  // set when no sign change was found in the range
};

/// Locate every crossing of `criterion` along one family parameter (axis 0 =
/// z/lambda, axis 1 = r/alpha) with the other parameter fixed, refined by
/// bisection to |Δparam| ≤ 1e-6.
BoundaryTrace trace_boundary(StateFamily family, BoundaryCriterion criterion, int axis, double lo,
                             double hi, double fixed_other, const ScanOptions& opts = {},
                             std::size_t probes = 256);

}  // namespace zps
