#include "hopf/flow.hpp"

#include "hopf/errors.hpp"
#include "hopf/numerics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hopf {

namespace {

struct StepRange {
    Eigen::Index first;  // index of the span start on the path grid
    Eigen::Index count;  // number of steps
};

StepRange resolve(const WienerPath& path, const std::optional<TimeSpan>& span) {
    if (!span) return {0, path.steps()};
    const auto i0 = static_cast<Eigen::Index>(path.grid_index(span->start));
    const auto i1 = static_cast<Eigen::Index>(path.grid_index(span->end));
    if (i0 < 0 || i1 > path.steps() || i1 <= i0)
        throw std::invalid_argument("time span must be a non-empty window of the path grid");
    return {i0, i1 - i0};
}

StepRange resolve(const ControlPath& g, const std::optional<TimeSpan>& span) {
    if (!span) return {0, g.steps()};
    auto index = [&](double t) {
        const double u = (t - g.t0()) / g.dt();
        const double n = std::round(u);
        if (std::abs(u - n) > 1e-9 * std::max(1.0, std::abs(n)))
            throw std::invalid_argument("time span is not on the control grid");
        return static_cast<Eigen::Index>(n);
    };
    const Eigen::Index i0 = index(span->start), i1 = index(span->end);
    if (i0 < 0 || i1 > g.steps() || i1 <= i0)
        throw std::invalid_argument("time span must be a non-empty window of the control grid");
    return {i0, i1 - i0};
}

void check_state(const State& z, double t) {
    const double n = z.norm();
    if (!(n <= kBlowUpNorm)) throw BlowUpError(t, n);
}

void check_tangent(const Mat2& m, double t) {
    if (!(m.cwiseAbs().maxCoeff() <= 1e300)) throw TangentBlowUpError(t);
}

struct GramSchmidt {
    Mat2 q;
    double r11, r12, r22;
};

GramSchmidt gram_schmidt(const Mat2& m) {
    GramSchmidt out;
    out.r11 = m.col(0).norm();
    out.q.col(0) = m.col(0) / out.r11;
    out.r12 = out.q.col(0).dot(m.col(1));
    const State rest = m.col(1) - out.r12 * out.q.col(0);
    out.r22 = rest.norm();
    out.q.col(1) = rest / out.r22;
    return out;
}

}  // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::euler_maruyama: return "euler_maruyama";
        case Scheme::conjugated_ou: return "conjugated_ou";
        case Scheme::controlled_heun: return "controlled_heun";
    }
    return "unknown";
}

Trajectory integrate_sde(const Params& p, const WienerPath& path, const State& z0, std::optional<TimeSpan> span) {
    const auto [first, count] = resolve(path, span);
    const double dt = path.dt();
    Trajectory out{Eigen::VectorXd(count + 1), Samples2(2, count + 1), p, path.seed(), Scheme::euler_maruyama};
    State z = z0;
    check_state(z, path.time(first));
    out.times(0) = path.time(first);
    out.states.col(0) = z;
    for (Eigen::Index k = 0; k < count; ++k) {
        z = euler_maruyama_step(p, z, path.increment(first + k), dt);
        const double t = path.time(first + k + 1);
        check_state(z, t);
        out.times(k + 1) = t;
        out.states.col(k + 1) = z;
    }
    return out;
}

State flow_endpoint(const Params& p, const WienerPath& path, const State& z0, std::optional<TimeSpan> span) {
    const auto [first, count] = resolve(path, span);
    const double dt = path.dt();
    State z = z0;
    for (Eigen::Index k = 0; k < count; ++k) {
        z = euler_maruyama_step(p, z, path.increment(first + k), dt);
        // Checking every step costs a sqrt; overflow is sticky, so a periodic check suffices.
        if ((k & 1023) == 1023) check_state(z, path.time(first + k + 1));
    }
    check_state(z, path.time(first + count));
    return z;
}

TangentFlow integrate_variational(const Params& p, const Trajectory& traj) {
    TangentFlow out{traj.times, {}};
    const Eigen::Index n = traj.size();
    out.matrices.reserve(static_cast<std::size_t>(n));
    Mat2 phi = Mat2::Identity();
    out.matrices.push_back(phi);
    Mat2 j0 = jacobian(p, traj.states.col(0));
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double dt = traj.times(k + 1) - traj.times(k);
        const Mat2 j1 = jacobian(p, traj.states.col(k + 1));
        phi = heun_tangent_step(j0, j1, phi, dt);
        check_tangent(phi, traj.times(k + 1));
        out.matrices.push_back(phi);
        j0 = j1;
    }
    return out;
}

JointResult integrate_joint(const Params& p, const WienerPath& path, const State& z0, std::optional<TimeSpan> span,
                            const JointOptions& opts) {
    if (opts.renorm_every < 1) throw std::invalid_argument("integrate_joint: renorm_every must be >= 1");
    const auto [first, count] = resolve(path, span);
    const double dt = path.dt();

    JointResult out;
    out.horizon = path.time(first + count) - path.time(first);
    if (opts.record_trajectory)
        out.trajectory = Trajectory{Eigen::VectorXd(count + 1), Samples2(2, count + 1), p, path.seed(),
                                    Scheme::euler_maruyama};
    if (opts.record_blocks) {
        const auto blocks = static_cast<std::size_t>((count + opts.renorm_every - 1) / opts.renorm_every);
        out.block_log_r1.reserve(blocks);
        out.block_log_r2.reserve(blocks);
        out.block_end.reserve(blocks);
    }

    State z = z0;
    check_state(z, path.time(first));
    if (out.trajectory) {
        out.trajectory->times(0) = path.time(first);
        out.trajectory->states.col(0) = z;
    }

    // Phi(t) = frame * exp(log_scale) * upper, frame orthonormal, upper upper-triangular.
    Mat2 phi = Mat2::Identity();
    Mat2 upper = Mat2::Identity();
    double log_scale = 0.0;
    std::vector<double> all_r1, all_r2;
    if (!opts.record_blocks) {
        all_r1.reserve(static_cast<std::size_t>(count / opts.renorm_every + 1));
        all_r2.reserve(all_r1.capacity());
    }

    Mat2 j0 = jacobian(p, z);
    for (Eigen::Index k = 0; k < count; ++k) {
        z = euler_maruyama_step(p, z, path.increment(first + k), dt);
        const double t = path.time(first + k + 1);
        check_state(z, t);
        if (out.trajectory) {
            out.trajectory->times(k + 1) = t;
            out.trajectory->states.col(k + 1) = z;
        }
        const Mat2 j1 = jacobian(p, z);
        phi = heun_tangent_step(j0, j1, phi, dt);
        j0 = j1;

        if ((k + 1) % opts.renorm_every == 0 || k + 1 == count) {
            check_tangent(phi, t);
            const GramSchmidt qr = gram_schmidt(phi);
            if (!(qr.r11 > 0.0) || !(qr.r22 > 0.0) || !std::isfinite(qr.r11) || !std::isfinite(qr.r22))
                throw TangentBlowUpError(t);
            const double l1 = std::log(qr.r11), l2 = std::log(qr.r22);
            if (opts.record_blocks) {
                out.block_log_r1.push_back(l1);
                out.block_log_r2.push_back(l2);
                out.block_end.push_back(k + 1);
            } else {
                all_r1.push_back(l1);
                all_r2.push_back(l2);
            }
            Mat2 r;
            r << qr.r11, qr.r12, 0.0, qr.r22;
            upper = r * upper;
            const double m = upper.cwiseAbs().maxCoeff();
            log_scale += std::log(m);
            upper /= m;
            phi = qr.q;
        }
    }

    out.final_state = z;
    if (opts.record_blocks) {
        out.log_r1 = pairwise_sum(out.block_log_r1);
        out.log_r2 = pairwise_sum(out.block_log_r2);
    } else {
        out.log_r1 = pairwise_sum(all_r1);
        out.log_r2 = pairwise_sum(all_r2);
    }
    out.tangent_scaled = phi * upper;
    out.tangent_log_scale = log_scale;
    return out;
}

Trajectory integrate_rde_ou(const Params& p, const WienerPath& path, double c, const State& z0,
                            std::optional<TimeSpan> span) {
    const auto [first, count] = resolve(path, span);
    const WienerPath window(path.first_index() + first, path.dt(), path.increments().middleCols(first, count),
                            path.seed());
    const Samples2 ou = ou_process(window, c, State::Zero());
    const double dt = path.dt(), s = p.sigma();

    auto rhs = [&](const State& psi, Eigen::Index k) -> State {
        const State zs = ou.col(k);
        return drift(p, State(psi + s * zs)) + (c * s) * zs;
    };

    Trajectory out{Eigen::VectorXd(count + 1), Samples2(2, count + 1), p, path.seed(), Scheme::conjugated_ou};
    State psi = z0 - s * ou.col(0);
    out.times(0) = window.time(0);
    out.states.col(0) = z0;
    for (Eigen::Index k = 0; k < count; ++k) {
        const State k1 = rhs(psi, k);
        const State k2 = rhs(State(psi + dt * k1), k + 1);
        psi += (0.5 * dt) * (k1 + k2);
        const State phi = psi + s * ou.col(k + 1);
        const double t = window.time(k + 1);
        check_state(phi, t);
        out.times(k + 1) = t;
        out.states.col(k + 1) = phi;
    }
    return out;
}

std::pair<Trajectory, TangentFlow> integrate_controlled(const Params& p, const ControlPath& g, const State& z0,
                                                        std::optional<TimeSpan> span) {
    const auto [first, count] = resolve(g, span);
    const double dt = g.dt();
    auto time = [&](Eigen::Index i) { return g.t0() + dt * static_cast<double>(i); };

    Trajectory traj{Eigen::VectorXd(count + 1), Samples2(2, count + 1), p, 0, Scheme::controlled_heun};
    State z = z0;
    traj.times(0) = time(first);
    traj.states.col(0) = z;
    for (Eigen::Index k = 0; k < count; ++k) {
        const State forcing = p.sigma() * g.slope(first + k);
        const State k1 = drift(p, z) + forcing;
        const State k2 = drift(p, State(z + dt * k1)) + forcing;
        z += (0.5 * dt) * (k1 + k2);
        check_state(z, time(first + k + 1));
        traj.times(k + 1) = time(first + k + 1);
        traj.states.col(k + 1) = z;
    }
    TangentFlow tangent = integrate_variational(p, traj);
    return {std::move(traj), std::move(tangent)};
}

Eigen::VectorXd two_point_distance(const Params& p, const WienerPath& path, const State& u, const State& v,
                                   std::optional<TimeSpan> span) {
    const auto [first, count] = resolve(path, span);
    const double dt = path.dt();
    Eigen::VectorXd d(count + 1);
    State zu = u, zv = v;
    d(0) = (zu - zv).norm();
    for (Eigen::Index k = 0; k < count; ++k) {
        const auto dw = path.increment(first + k);
        zu = euler_maruyama_step(p, zu, dw, dt);
        zv = euler_maruyama_step(p, zv, dw, dt);
        const double t = path.time(first + k + 1);
        check_state(zu, t);
        check_state(zv, t);
        d(k + 1) = (zu - zv).norm();
    }
    return d;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const auto old = os.precision(17);
    os << "t,x,y\n";
    for (Eigen::Index i = 0; i < traj.size(); ++i)
        os << traj.times(i) << ',' << traj.states(0, i) << ',' << traj.states(1, i) << '\n';
    os.precision(old);
}

void write_tangent_csv(std::ostream& os, const TangentFlow& flow) {
    const auto old = os.precision(17);
    os << "t,phi11,phi12,phi21,phi22\n";
    for (std::size_t i = 0; i < flow.matrices.size(); ++i) {
        const Mat2& m = flow.matrices[i];
        os << flow.times(static_cast<Eigen::Index>(i)) << ',' << m(0, 0) << ',' << m(0, 1) << ',' << m(1, 0) << ','
           << m(1, 1) << '\n';
    }
    os.precision(old);
}

}  // namespace hopf
