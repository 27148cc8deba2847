#include "hopf/lyapunov.hpp"

#include "hopf/attractor.hpp"
#include "hopf/errors.hpp"
#include "hopf/numerics.hpp"
#include "hopf/parallel.hpp"
#include "hopf/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>

namespace hopf {

namespace {

constexpr std::uint64_t kInitialTag = 0x494e495449414cULL;
constexpr double kDichotomyPullback = 50.0;

State initial_state(const Params& p, std::uint64_t seed, const std::optional<State>& given) {
    if (given) return *given;
    if (!(p.sigma() > 0.0)) return State::Zero();
    return sample_stationary(p, 1, derive_key(seed, kInitialTag)).states.col(0);
}

// Time average of per-block logs after burn-in, with batch-means CI.
LyapunovEstimate estimate_from_blocks(const std::vector<double>& logs, const std::vector<Eigen::Index>& block_end,
                                      double dt, double horizon, int batches, EstimateKind kind) {
    LyapunovEstimate est;
    est.kind = kind;
    est.horizon = horizon;
    est.value = pairwise_sum(logs) / horizon;

    const std::size_t blocks = logs.size();
    const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(std::max(batches, 1)), blocks);
    std::vector<double> rates;
    rates.reserve(nb);
    std::size_t begin = 0;
    for (std::size_t b = 0; b < nb; ++b) {
        const std::size_t end = blocks * (b + 1) / nb;
        const Eigen::Index step0 = begin == 0 ? 0 : block_end[begin - 1];
        const double span = dt * static_cast<double>(block_end[end - 1] - step0);
        rates.push_back(pairwise_sum(std::span(logs).subspan(begin, end - begin)) / span);
        begin = end;
    }
    est.sample_count = rates.size();
    est.ci_halfwidth = batch_means(rates).ci_halfwidth;
    return est;
}

JointResult run_after_burn_in(const Params& p, std::uint64_t seed, double T, const LyapunovOptions& opts) {
    if (!(T > opts.burn_in) || opts.burn_in < 0.0)
        throw std::invalid_argument("Lyapunov estimate: need T > burn_in >= 0");
    const WienerPath path = sample_path(seed, 0.0, T, opts.dt);
    State z = initial_state(p, seed, opts.initial);
    if (opts.burn_in > 0.0) z = flow_endpoint(p, path, z, TimeSpan{0.0, opts.burn_in});
    JointOptions jo;
    jo.renorm_every = opts.renorm_every;
    return integrate_joint(p, path, z, TimeSpan{opts.burn_in, T}, jo);
}

}  // namespace

const char* kind_name(EstimateKind k) {
    switch (k) {
        case EstimateKind::top: return "top";
        case EstimateKind::ftle_sup: return "ftle_sup";
        case EstimateKind::ftle_inf: return "ftle_inf";
        case EstimateKind::sum: return "sum";
        case EstimateKind::dichotomy_sup: return "dichotomy_sup";
    }
    return "unknown";
}

Vec2<double> singular_values(const Mat2& m) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double s_max = 0.5 * (std::hypot(a + d, c - b) + std::hypot(a - d, b + c));
    const double det = std::abs(a * d - b * c);
    return {s_max, s_max > 0.0 ? det / s_max : 0.0};
}

FtleSample ftle_from_tangent(const Mat2& phi, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("ftle_from_tangent: T must be positive");
    const Vec2<double> sv = singular_values(phi);
    FtleSample s;
    s.T = T;
    s.sup_value = std::log(sv(0)) / T;
    s.inf_value = std::log(sv(1)) / T;
    return s;
}

LyapunovEstimate top_lyapunov(const Params& p, std::uint64_t seed, double T, const LyapunovOptions& opts) {
    const JointResult r = run_after_burn_in(p, seed, T, opts);
    return estimate_from_blocks(r.block_log_r1, r.block_end, opts.dt, r.horizon, opts.batches, EstimateKind::top);
}

CertifiedEstimate top_lyapunov_certified(const Params& p, std::uint64_t seed, double T, const LyapunovOptions& opts,
                                         double T_cap) {
    if (!(T_cap >= T)) throw std::invalid_argument("top_lyapunov_certified: T_cap must be >= T");
    CertifiedEstimate out;
    for (double horizon = T; horizon <= T_cap; horizon *= 2.0) {
        out.estimate = top_lyapunov(p, seed, horizon, opts);
        if (out.estimate.excludes_zero()) {
            out.determined = true;
            break;
        }
    }
    return out;
}

LyapunovEstimate lambda_sum_estimate(const Params& p, std::uint64_t seed, double T, const LyapunovOptions& opts) {
    const JointResult r = run_after_burn_in(p, seed, T, opts);
    std::vector<double> logs(r.block_log_r1.size());
    for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = r.block_log_r1[i] + r.block_log_r2[i];
    return estimate_from_blocks(logs, r.block_end, opts.dt, r.horizon, opts.batches, EstimateKind::sum);
}

FtleSample ftle(const Params& p, std::uint64_t seed, const State& z0, double T, const FtleOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("ftle: T must be positive");
    const WienerPath path = sample_path(seed, -opts.pullback, T, opts.dt);
    State z = z0;
    if (opts.pullback > 0.0) z = flow_endpoint(p, path, z, TimeSpan{-opts.pullback, 0.0});
    JointOptions jo;
    jo.renorm_every = opts.renorm_every;
    jo.record_blocks = false;
    const JointResult r = integrate_joint(p, path, z, TimeSpan{0.0, T}, jo);

    FtleSample s;
    s.seed = seed;
    s.initial = z0;
    s.T = r.horizon;
    const double log_sigma_max = r.tangent_log_scale + std::log(singular_values(r.tangent_scaled)(0));
    s.sup_value = log_sigma_max / s.T;
    // ln det Phi(T) is exactly the sum of both QR diagonals, so sup + inf = (1/T) ln det.
    s.inf_value = (r.log_r1 + r.log_r2 - log_sigma_max) / s.T;
    return s;
}

FtleDistribution ftle_distribution(const Params& p, std::size_t n, double T, std::uint64_t seed0,
                                   const FtleOptions& opts) {
    if (n < 1) throw std::invalid_argument("ftle_distribution: need n >= 1");
    std::vector<std::optional<FtleSample>> slots(n);
    parallel_for(n, opts.threads, [&](std::size_t i) {
        const std::uint64_t seed = seed0 + i;
        try {
            slots[i] = ftle(p, seed, initial_state(p, seed, std::nullopt), T, opts);
        } catch (const NumericalError&) {
            slots[i].reset();
        }
    });
    FtleDistribution out;
    for (auto& s : slots) {
        if (s)
            out.samples.push_back(*s);
        else
            ++out.failures;
    }
    return out;
}

std::vector<DichotomyPoint> dichotomy_sup_estimate(const Params& p, std::size_t n, const std::vector<double>& T_list,
                                                   std::uint64_t seed0, FtleOptions opts) {
    if (n < 1) throw std::invalid_argument("dichotomy_sup_estimate: need n >= 1");
    opts.pullback = kDichotomyPullback;
    std::vector<DichotomyPoint> out;
    for (double T : T_list) {
        const FtleDistribution dist = ftle_distribution(p, n, T, seed0, opts);
        DichotomyPoint pt;
        pt.T = T;
        pt.samples = dist.samples.size();
        pt.max_ftle = -std::numeric_limits<double>::infinity();
        for (const auto& s : dist.samples) pt.max_ftle = std::max(pt.max_ftle, s.sup_value);
        out.push_back(pt);
    }
    return out;
}

double directional_growth(const Params& p, const State& z, const State& v) {
    if (std::abs(v.norm() - 1.0) > 1e-12) throw std::invalid_argument("directional_growth: v must be a unit vector");
    return v.dot(jacobian(p, z) * v);
}

void write_ftle_csv(std::ostream& os, const FtleDistribution& dist) {
    const auto old = os.precision(17);
    os << "seed,T,ftle_sup,ftle_inf\n";
    for (const auto& s : dist.samples) os << s.seed << ',' << s.T << ',' << s.sup_value << ',' << s.inf_value << '\n';
    os.precision(old);
}

void write_dichotomy_csv(std::ostream& os, const std::vector<DichotomyPoint>& points) {
    const auto old = os.precision(17);
    os << "T,max_ftle\n";
    for (const auto& pt : points) os << pt.T << ',' << pt.max_ftle << '\n';
    os.precision(old);
}

void write_estimate_csv(std::ostream& os, const LyapunovEstimate& est) {
    const auto old = os.precision(17);
    os << "value,ci,T,n\n" << est.value << ',' << est.ci_halfwidth << ',' << est.horizon << ',' << est.sample_count
       << '\n';
    os.precision(old);
}

}  // namespace hopf
