#pragma once

#include "hopf/model.hpp"
#include "hopf/noise.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace hopf {

inline constexpr double kDefaultDt = 1e-3;
inline constexpr double kBlowUpNorm = 1e8;

struct TimeSpan {
    double start;
    double end;
};

enum class Scheme { euler_maruyama, conjugated_ou, controlled_heun };

const char* scheme_name(Scheme s);

/// phi(t, omega, z) sampled on the integration grid.
struct Trajectory {
    Eigen::VectorXd times;
    Samples2 states;
    Params params;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::euler_maruyama;

    Eigen::Index size() const { return states.cols(); }
    State state(Eigen::Index i) const { return states.col(i); }
    State back() const { return states.col(states.cols() - 1); }
};

/// Phi(t, omega, z), the solution of Phi' = Df(phi_t) Phi with Phi(0) = I.
struct TangentFlow {
    Eigen::VectorXd times;
    std::vector<Mat2> matrices;
};

// Single steps, shared by every integrator so that fused and unfused loops agree bit for bit.

/// Euler-Maruyama: z + f(z) dt + sigma dW.
template <typename Derived>
State euler_maruyama_step(const Params& p, const State& z, const Eigen::MatrixBase<Derived>& dW, double dt) {
    return z + dt * drift(p, z) + p.sigma() * dW;
}

/// Heun step of Phi' = J(t) Phi with J frozen at the two grid end points.
inline Mat2 heun_tangent_step(const Mat2& j0, const Mat2& j1, const Mat2& phi, double dt) {
    const Mat2 k1 = j0 * phi;
    const Mat2 k2 = j1 * (phi + dt * k1);
    return phi + (0.5 * dt) * (k1 + k2);
}

/// Euler-Maruyama on the path grid over `span` (whole path if omitted).
/// Throws BlowUpError if |z| exceeds 1e8 or stops being finite.
Trajectory integrate_sde(const Params& p, const WienerPath& path, const State& z0,
                         std::optional<TimeSpan> span = std::nullopt);

/// Final state of integrate_sde without storing the trajectory.
State flow_endpoint(const Params& p, const WienerPath& path, const State& z0,
                    std::optional<TimeSpan> span = std::nullopt);

/// Heun integration of the variational equation along a stored trajectory.
/// Throws TangentBlowUpError when Phi leaves the double range.
TangentFlow integrate_variational(const Params& p, const Trajectory& traj);

struct JointOptions {
    int renorm_every = 10;
    bool record_trajectory = false;
    bool record_blocks = true;
};

/// Fused SDE + tangent integration with QR (Gram-Schmidt) renormalisation every
/// `renorm_every` steps and at the end of the span.
struct JointResult {
    std::optional<Trajectory> trajectory;
    State final_state;
    double log_r1 = 0.0;  // sum of ln R(0,0) over blocks
    double log_r2 = 0.0;  // sum of ln R(1,1) over blocks
    std::vector<double> block_log_r1, block_log_r2;
    std::vector<Eigen::Index> block_end;  // step index (relative to span start) closing each block
    // Phi(T) = exp(tangent_log_scale) * tangent_scaled, kept scaled to avoid overflow.
    Mat2 tangent_scaled = Mat2::Identity();
    double tangent_log_scale = 0.0;
    double horizon = 0.0;
};

JointResult integrate_joint(const Params& p, const WienerPath& path, const State& z0,
                            std::optional<TimeSpan> span = std::nullopt, const JointOptions& opts = {});

/// The same solution computed through the OU conjugacy: Psi' = f(Psi + sigma Z_t) + c sigma Z_t
/// integrated by Heun (Z at the two step ends), then phi = Psi + sigma Z. Z starts at 0.
Trajectory integrate_rde_ou(const Params& p, const WienerPath& path, double c, const State& z0,
                            std::optional<TimeSpan> span = std::nullopt);

/// Heun on z' = f(z) + sigma g'(t), g' the forward difference of the control on each step,
/// together with the tangent flow along the result.
std::pair<Trajectory, TangentFlow> integrate_controlled(const Params& p, const ControlPath& g, const State& z0,
                                                        std::optional<TimeSpan> span = std::nullopt);

/// |phi(t, omega, U) - phi(t, omega, V)| at every grid time of the span.
Eigen::VectorXd two_point_distance(const Params& p, const WienerPath& path, const State& u, const State& v,
                                   std::optional<TimeSpan> span = std::nullopt);

/// CSV `t,x,y`.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// CSV `t,phi11,phi12,phi21,phi22`.
void write_tangent_csv(std::ostream& os, const TangentFlow& flow);

}  // namespace hopf
