#pragma once

#include "hopf/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>

namespace hopf {

using Samples2 = Eigen::Matrix<double, 2, Eigen::Dynamic>;

/// Two-component Brownian path sampled on a uniform grid, stored as increments.
///
/// The grid is anchored at absolute indices: the point t0 has index
/// round(t0 / dt), and increment k of a sampled path is drawn from counter
/// (index of its left end). Two windows of the same (seed, dt, stream) therefore
/// agree on their overlap, so one seed names one path on the whole time axis.
class WienerPath {
public:
    WienerPath(std::int64_t first_index, double dt, Samples2 increments, std::uint64_t seed);

    double dt() const { return dt_; }
    double t0() const { return static_cast<double>(first_index_) * dt_; }
    double t1() const { return static_cast<double>(first_index_ + steps()) * dt_; }
    double time(Eigen::Index i) const { return static_cast<double>(first_index_ + i) * dt_; }
    std::int64_t first_index() const { return first_index_; }
    Eigen::Index steps() const { return increments_.cols(); }
    std::uint64_t seed() const { return seed_; }

    /// Increment over [time(k), time(k + 1)].
    auto increment(Eigen::Index k) const { return increments_.col(k); }
    const Samples2& increments() const { return increments_; }

    /// omega(time(i)) - omega(t0) for i = 0..steps().
    Samples2 cumulative() const;

    /// Grid index of a time lying on this path's grid; throws if off-grid.
    std::int64_t grid_index(double t) const;

    friend bool operator==(const WienerPath& l, const WienerPath& r) {
        return l.first_index_ == r.first_index_ && l.dt_ == r.dt_ && l.seed_ == r.seed_ &&
               l.increments_ == r.increments_;
    }

private:
    std::int64_t first_index_;
    double dt_;
    Samples2 increments_;
    std::uint64_t seed_;
};

/// Brownian path on [t0, t1] with increments Normal(0, dt). t0 must lie on the dt
/// grid and (t1 - t0)/dt must be an integer (both within 1e-9). `stream` selects
/// an independent path for ensemble member k under the same seed.
WienerPath sample_path(std::uint64_t seed, double t0, double t1, double dt, std::uint64_t stream = 0);

/// The shifted path theta_s omega (u -> omega(u + s) - omega(s)) restricted to the
/// part of its domain that overlaps [t0, t1]. Increments are reused verbatim.
WienerPath shift(const WienerPath& path, double s);

/// Sum each run of `factor` consecutive increments: the same Brownian path seen on a coarser grid.
WienerPath coarsen(const WienerPath& path, int factor);

/// Ornstein-Uhlenbeck series dZ = -c Z dt + dW on the path grid, exact update
/// Z_{k+1} = e^{-c dt} Z_k + sqrt((1 - e^{-2 c dt}) / (2 c dt)) dW_k. Returns steps()+1 states.
Samples2 ou_process(const WienerPath& path, double c, const State& z_init);

/// Deterministic control signal g in C_0 on a uniform grid, linearly interpolated.
class ControlPath {
public:
    ControlPath(double t0, double dt, Samples2 samples);

    double dt() const { return dt_; }
    double t0() const { return t0_; }
    double t1() const { return t0_ + dt_ * static_cast<double>(steps()); }
    Eigen::Index steps() const { return samples_.cols() - 1; }
    const Samples2& samples() const { return samples_; }

    State operator()(double t) const;
    /// Forward difference (g_{k+1} - g_k) / dt on step k.
    State slope(Eigen::Index k) const { return (samples_.col(k + 1) - samples_.col(k)) / dt_; }

private:
    double t0_, dt_;
    Samples2 samples_;
};

/// h(t) = -t f(z) / sigma on [0, T]; the controlled flow started at z stays at z.
ControlPath steering_path_hold(const Params& p, const State& z, double T, double dt);

/// h(t) = (psi(t) - x - int_0^t f(psi)) / sigma on [0, t0] with psi the straight
/// line from x to y; the controlled flow moves x along psi to y at time t0.
/// The integral uses the trapezoid rule on the grid.
ControlPath steering_path_line(const Params& p, const State& x, const State& y, double t0, double dt);

/// CSV with header `t,dW1,dW2`, one row per step, 17 significant digits, preceded
/// by a `# dt=` comment so the grid survives the decimal round trip.
void write_path_csv(std::ostream& os, const WienerPath& path);
/// Inverse of write_path_csv; lines starting with '#' are skipped.
WienerPath read_path_csv(std::istream& is, std::uint64_t seed = 0);

}  // namespace hopf
