#include "hopf/sweep.hpp"

#include "hopf/errors.hpp"
#include "hopf/numerics.hpp"
#include "hopf/parallel.hpp"
#include "hopf/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hopf {

namespace {

SweepCell run_cell(const GridSpec& g, int i, int j, double T) {
    SweepCell cell;
    cell.b = g.b_at(i);
    cell.alpha = g.alpha_at(j);
    const Params p = g.params_at(i, j);
    cell.upper_bound = lyapunov_upper_bound(p);
    try {
        cell.kappa = kappa(p);
    } catch (const BoundUndefinedError&) {
        cell.kappa = std::numeric_limits<double>::quiet_NaN();
    }

    std::vector<double> values, ci_sq;
    try {
        for (int k = 0; k < g.seeds; ++k) {
            const LyapunovEstimate e = top_lyapunov(p, cell_seed(g.seed0, i, j, k), T, g.numerics);
            values.push_back(e.value);
            ci_sq.push_back(e.ci_halfwidth * e.ci_halfwidth);
        }
    } catch (const NumericalError&) {
        cell.failed = true;
        cell.estimate.value = std::numeric_limits<double>::quiet_NaN();
        return cell;
    }
    const double n = static_cast<double>(values.size());
    cell.estimate.kind = EstimateKind::top;
    cell.estimate.value = pairwise_sum(values) / n;
    cell.estimate.ci_halfwidth = std::sqrt(pairwise_sum(ci_sq)) / n;
    cell.estimate.horizon = T - g.numerics.burn_in;
    cell.estimate.sample_count = values.size();
    return cell;
}

}  // namespace

double GridSpec::b_at(int i) const { return b_min + (b_max - b_min) * i / (b_steps - 1); }
double GridSpec::alpha_at(int j) const { return alpha_min + (alpha_max - alpha_min) * j / (alpha_steps - 1); }
Params GridSpec::params_at(int i, int j) const { return Params(alpha_at(j), beta, a, b_at(i), sigma); }

void GridSpec::validate() const {
    if (b_steps < 2 || alpha_steps < 2) throw std::invalid_argument("GridSpec: need at least 2 steps per axis");
    if (!(T > numerics.burn_in)) throw std::invalid_argument("GridSpec: T must exceed the burn-in");
    if (seeds < 1) throw std::invalid_argument("GridSpec: need at least one seed per cell");
    if (refine_T != 0.0 && !(refine_T > numerics.burn_in))
        throw std::invalid_argument("GridSpec: refine_T must exceed the burn-in");
    Params(alpha_min, beta, a, b_min, sigma);
    if (!(sigma > 0.0)) throw std::invalid_argument("GridSpec: sigma must be positive");
}

std::uint64_t cell_seed(std::uint64_t seed0, int i, int j, int k) {
    return derive_key(derive_key(seed0, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)),
                      static_cast<std::uint64_t>(k));
}

SweepResult sweep_top_lyapunov(const GridSpec& grid, unsigned threads) {
    grid.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::size_t nb = static_cast<std::size_t>(grid.b_steps);
    const std::size_t n = nb * static_cast<std::size_t>(grid.alpha_steps);

    SweepResult out;
    out.grid = grid;
    out.cells.resize(n);
    parallel_for(n, threads, [&](std::size_t c) {
        out.cells[c] = run_cell(grid, static_cast<int>(c % nb), static_cast<int>(c / nb), grid.T);
    });

    if (grid.refine_T > 0.0) {
        // Cells on either side of a change of sign, or of a pair neither of which is certified.
        std::vector<std::size_t> todo;
        for (int j = 0; j < grid.alpha_steps; ++j) {
            for (int i = 0; i + 1 < grid.b_steps; ++i) {
                const SweepCell& l = out.at(i, j);
                const SweepCell& r = out.at(i + 1, j);
                if (l.failed || r.failed) continue;
                if (l.sign() != r.sign() || (!l.certified() && !r.certified())) {
                    for (int ii : {i, i + 1}) {
                        const std::size_t idx = static_cast<std::size_t>(j) * nb + static_cast<std::size_t>(ii);
                        if (todo.empty() || todo.back() != idx) todo.push_back(idx);
                    }
                }
            }
        }
        std::sort(todo.begin(), todo.end());
        todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
        parallel_for(todo.size(), threads, [&](std::size_t t) {
            const std::size_t c = todo[t];
            out.cells[c] = run_cell(grid, static_cast<int>(c % nb), static_cast<int>(c / nb), grid.refine_T);
            out.cells[c].refined = true;
        });
    }
    out.cpu_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

CurveEstimate zero_contour(const SweepResult& result) {
    const GridSpec& g = result.grid;
    CurveEstimate curve;
    for (int j = 0; j < g.alpha_steps; ++j) {
        const SweepCell* prev = nullptr;
        bool any = false;
        for (int i = 0; i < g.b_steps; ++i) {
            const SweepCell& cell = result.at(i, j);
            if (!cell.certified()) continue;
            if (prev && prev->sign() != cell.sign()) {
                ContourPoint pt;
                pt.alpha = cell.alpha;
                pt.b_lo = prev->b;
                pt.b_hi = cell.b;
                const double v0 = prev->estimate.value, v1 = cell.estimate.value;
                pt.b_star = prev->b + (0.0 - v0) * (cell.b - prev->b) / (v1 - v0);
                pt.determined = true;
                curve.points.push_back(pt);
                any = true;
            }
            prev = &cell;
        }
        if (!any) {
            ContourPoint pt;
            pt.alpha = g.alpha_at(j);
            pt.b_star = pt.b_lo = pt.b_hi = std::numeric_limits<double>::quiet_NaN();
            curve.points.push_back(pt);
        }
    }
    return curve;
}

SweepConsistency check_consistency(const SweepResult& result) {
    SweepConsistency out;
    for (std::size_t c = 0; c < result.cells.size(); ++c) {
        const SweepCell& cell = result.cells[c];
        if (cell.failed) continue;
        if (std::isfinite(cell.kappa) && std::abs(cell.b) <= cell.kappa && !(cell.estimate.value < 0.0))
            out.small_shear_mismatches.push_back(c);
        if (cell.estimate.value - cell.estimate.ci_halfwidth > cell.upper_bound) out.bound_violations.push_back(c);
    }
    return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& result) {
    const auto old = os.precision(17);
    os << "alpha,b,lambda_top,ci,certified\n";
    for (const SweepCell& c : result.cells)
        os << c.alpha << ',' << c.b << ',' << c.estimate.value << ',' << c.estimate.ci_halfwidth << ','
           << (c.certified() ? 1 : 0) << '\n';
    os.precision(old);
}

void write_curve_csv(std::ostream& os, const CurveEstimate& curve) {
    const auto old = os.precision(17);
    os << "alpha,b_star,b_lo,b_hi\n";
    for (const ContourPoint& p : curve.points) os << p.alpha << ',' << p.b_star << ',' << p.b_lo << ',' << p.b_hi << '\n';
    os.precision(old);
}

}  // namespace hopf
