#pragma once

#include "hopf/lyapunov.hpp"
#include "hopf/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hopf {

/// Rectangular (b, alpha) grid with fixed (a, beta, sigma) and a per-cell Monte Carlo budget.
struct GridSpec {
    double b_min = 0.0, b_max = 10.0;
    int b_steps = 17;
    double alpha_min = -2.0, alpha_max = 2.0;
    int alpha_steps = 17;
    double beta = 1.0, a = 1.0, sigma = 1.0;
    double T = 2000.0;         // per-seed horizon, burn-in included
    int seeds = 4;
    std::uint64_t seed0 = 1;
    double refine_T = 1e4;     // horizon for cells next to a sign change; 0 disables refinement
    LyapunovOptions numerics;  // dt, burn_in, renorm_every, batches

    double b_at(int i) const;
    double alpha_at(int j) const;
    Params params_at(int i, int j) const;
    void validate() const;
};

struct SweepCell {
    double alpha = 0.0, b = 0.0;
    LyapunovEstimate estimate;
    bool failed = false;   // blow-up in some seed; excluded from contouring
    bool refined = false;
    double kappa = 0.0;        // small-shear threshold at this (alpha, a, sigma)
    double upper_bound = 0.0;  // analytic upper bound for lambda_top at this cell

    bool certified() const { return !failed && estimate.excludes_zero(); }
    int sign() const { return estimate.value < 0.0 ? -1 : 1; }
};

struct SweepResult {
    GridSpec grid;
    std::vector<SweepCell> cells;  // row-major in alpha: index j * b_steps + i
    double cpu_seconds = 0.0;

    const SweepCell& at(int i_b, int j_alpha) const {
        return cells[static_cast<std::size_t>(j_alpha * grid.b_steps + i_b)];
    }
};

/// Seed of member k in cell (i, j): splitmix-derived from (seed0, i, j, k), so results do not
/// depend on how cells are scheduled.
std::uint64_t cell_seed(std::uint64_t seed0, int i, int j, int k);

/// lambda_top over the grid; per cell the mean over `seeds` runs, CI combined in quadrature.
/// With refine_T > 0 the cells on either side of a sign change are re-run at refine_T.
SweepResult sweep_top_lyapunov(const GridSpec& grid, unsigned threads = 0);

struct ContourPoint {
    double alpha = 0.0;
    double b_star = 0.0;  // linear interpolation of the zero between b_lo and b_hi
    double b_lo = 0.0, b_hi = 0.0;
    bool determined = false;
};

struct CurveEstimate {
    std::vector<ContourPoint> points;  // every crossing of every row; one undetermined entry per silent row
};

/// Zero crossings in b per alpha row between adjacent certified cells of opposite sign.
CurveEstimate zero_contour(const SweepResult& result);

struct SweepConsistency {
    std::vector<std::size_t> small_shear_mismatches;  // |b| <= kappa but estimate >= 0
    std::vector<std::size_t> bound_violations;        // estimate - CI > upper bound
};

SweepConsistency check_consistency(const SweepResult& result);

/// CSV `alpha,b,lambda_top,ci,certified`.
void write_sweep_csv(std::ostream& os, const SweepResult& result);
/// CSV `alpha,b_star,b_lo,b_hi`; undetermined rows carry nan.
void write_curve_csv(std::ostream& os, const CurveEstimate& curve);

}  // namespace hopf
