#pragma once

#include "hopf/flow.hpp"
#include "hopf/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace hopf {

enum class EstimateKind { top, ftle_sup, ftle_inf, sum, dichotomy_sup };

const char* kind_name(EstimateKind k);

struct LyapunovEstimate {
    double value = 0.0;         // 1/time
    double horizon = 0.0;       // averaging time (after burn-in)
    std::size_t sample_count = 0;
    double ci_halfwidth = 0.0;  // 95 %, batch means
    EstimateKind kind = EstimateKind::top;

    bool excludes_zero() const { return value - ci_halfwidth > 0.0 || value + ci_halfwidth < 0.0; }
};

struct FtleSample {
    std::uint64_t seed = 0;
    State initial = State::Zero();
    double T = 0.0;
    double sup_value = 0.0;  // (1/T) ln sigma_max(Phi(T))
    double inf_value = 0.0;  // (1/T) ln sigma_min(Phi(T))
};

/// Singular values (max, min) of a 2x2 matrix in closed form; sigma_min = |det| / sigma_max.
Vec2<double> singular_values(const Mat2& m);

/// FTLE pair of an explicit tangent matrix.
FtleSample ftle_from_tangent(const Mat2& phi, double T);

struct LyapunovOptions {
    double dt = kDefaultDt;
    double burn_in = 100.0;
    int renorm_every = 10;
    int batches = 20;
    std::optional<State> initial;  // default: a stationary sample (origin when sigma = 0)
};

/// Top exponent from the leading QR diagonal of the tangent flow along one path on
/// [0, T], averaged after burn-in; 95 % CI from batch means.
LyapunovEstimate top_lyapunov(const Params& p, std::uint64_t seed, double T, const LyapunovOptions& opts = {});

struct CertifiedEstimate {
    LyapunovEstimate estimate;
    bool determined = false;  // CI excludes 0 at some horizon <= T_cap
};

/// top_lyapunov at T, 2T, 4T, ... until the CI excludes 0 or the horizon would exceed T_cap.
CertifiedEstimate top_lyapunov_certified(const Params& p, std::uint64_t seed, double T,
                                         const LyapunovOptions& opts = {}, double T_cap = 1e5);

/// Sum of both exponents, (1/(T - burn_in)) sum(ln r_1 + ln r_2).
LyapunovEstimate lambda_sum_estimate(const Params& p, std::uint64_t seed, double T,
                                     const LyapunovOptions& opts = {});

struct FtleOptions {
    double dt = kDefaultDt;
    int renorm_every = 10;
    double pullback = 0.0;  // flow the initial state over [-pullback, 0] on the same path first
    unsigned threads = 1;
};

/// FTLE of Phi(T) along the path of `seed` from z0 (after the optional pullback burn-in).
FtleSample ftle(const Params& p, std::uint64_t seed, const State& z0, double T, const FtleOptions& opts = {});

struct FtleDistribution {
    std::vector<FtleSample> samples;
    std::size_t failures = 0;
};

/// n FTLE samples with seeds seed0 .. seed0 + n - 1 and stationary initial states.
FtleDistribution ftle_distribution(const Params& p, std::size_t n, double T, std::uint64_t seed0,
                                   const FtleOptions& opts = {});

struct DichotomyPoint {
    double T = 0.0;
    double max_ftle = 0.0;
    std::size_t samples = 0;
};

/// Per-T maxima of the FTLE sup over n samples started after a 50-unit pullback burn-in,
/// approximating sampling along the random equilibrium.
std::vector<DichotomyPoint> dichotomy_sup_estimate(const Params& p, std::size_t n, const std::vector<double>& T_list,
                                                   std::uint64_t seed0, FtleOptions opts = {});

/// <Df(z) v, v> for a unit vector v (|v| = 1 within 1e-12, else invalid_argument).
double directional_growth(const Params& p, const State& z, const State& v);

/// CSV `seed,T,ftle_sup,ftle_inf`.
void write_ftle_csv(std::ostream& os, const FtleDistribution& dist);
/// CSV `T,max_ftle`.
void write_dichotomy_csv(std::ostream& os, const std::vector<DichotomyPoint>& points);
/// CSV `value,ci,T,n`, one line.
void write_estimate_csv(std::ostream& os, const LyapunovEstimate& est);

}  // namespace hopf
