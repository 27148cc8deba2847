#pragma once

#include "hopf/flow.hpp"
#include "hopf/model.hpp"
#include "hopf/noise.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hopf {

inline constexpr double kSyncEpsilon = 1e-3;

/// Finite set of planar states evolved under one common noise path.
struct Cloud {
    Samples2 states;
    double time_label = 0.0;
    std::uint64_t seed = 0;

    Eigen::Index size() const { return states.cols(); }
};

/// Largest pairwise distance (exact: convex hull, then all hull-vertex pairs).
double diameter(const Samples2& points);
State centroid(const Samples2& points);

/// Inverse-CDF sampler for s = x^2 + y^2 under the stationary law: the CDF is
/// tabulated in closed form at 10^4 + 1 nodes on [0, s_max] with tail mass
/// beyond s_max below 1e-12, and inverted by linear interpolation.
class RadialSampler {
public:
    explicit RadialSampler(const Params& p, int nodes = 10000);

    double quantile(double u) const;
    double s_max() const { return s_max_; }

private:
    double s_max_;
    std::vector<double> cdf_;
};

/// n stationary samples: s by inverse CDF, angle uniform on [0, 2 pi). Requires sigma > 0.
Cloud sample_stationary(const Params& p, std::size_t n, std::uint64_t seed);

struct PullbackOptions {
    double dt = kDefaultDt;
    double sync_epsilon = kSyncEpsilon;
    double end_time = 0.0;          // pullback target time (0 unless studying A(theta_t omega))
    std::uint64_t cloud_seed = 0;   // 0: derive the initial cloud from the path seed
    unsigned threads = 1;
};

struct PullbackResult {
    Cloud initial;
    std::vector<double> checkpoints;  // pullback times T_c; cloud started at end_time - T_c
    std::vector<double> diameters;    // diameter at end_time for each checkpoint
    std::vector<Cloud> clouds;        // cloud at end_time for each checkpoint
    Cloud final_cloud;                // the cloud for the full pullback time T
    double sync_epsilon = kSyncEpsilon;
    double T = 0.0;
    bool synchronised = false;
    bool failed = false;              // some point blew up
    std::size_t blown_up = 0;
};

/// Flows n stationary samples from end_time - T_c to end_time under one path for every
/// checkpoint T_c (T is always included) and records the cloud diameters.
PullbackResult pullback_cloud(const Params& p, std::uint64_t seed, double T, std::size_t n,
                              std::vector<double> checkpoints = {}, const PullbackOptions& opts = {});

struct EquilibriumEstimate {
    State point;
    double diameter = 0.0;
    double T = 0.0;
    bool collapsed = false;  // false reports "not collapsed": diameter > sync_epsilon
};

/// Centroid of a 32-point pullback cloud, the random equilibrium A(omega) up to its diameter.
EquilibriumEstimate random_equilibrium_point(const Params& p, std::uint64_t seed, double T,
                                             const PullbackOptions& opts = {});

/// Least-squares slope of ln d(t) on the initial stretch where 1e-12 <= d(t) <= d(0).
/// Throws invalid_argument if U == V and NoDecayError if d never falls below d(0)/2.
double synchronisation_rate(const Params& p, std::uint64_t seed, const State& u, const State& v, double T,
                            double dt = kDefaultDt);

struct ContractionReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max over trials and grid times of d(t) / (e^{alpha t} d(0))
    double tolerance = 1e-6;
    bool passed() const { return violations == 0; }
};

/// max_t d(t) / (e^{alpha t} d(0)) for one pair under one path; 0 for U == V.
double contraction_ratio(const Params& p, const WienerPath& path, const State& u, const State& v);

/// Checks d(t) <= e^{alpha t} d(0) (1 + 1e-6) for `trials` random (seed, U, V), U and V uniform
/// in [-2, 2]^2.
ContractionReport uniform_contraction_check(const Params& p, std::size_t trials, double T,
                                            std::uint64_t seed0 = 1, double dt = kDefaultDt);

struct RadialHistogram {
    std::vector<double> s_lo, s_hi, empirical, analytic;
    double l1 = 0.0;  // sum |empirical - analytic| of bin probabilities
};

struct DensityOptions {
    double dt = kDefaultDt;
    double burn_in = 100.0;
};

/// Histogram of s = x^2 + y^2 along one trajectory on [0, T] after burn-in, against the
/// analytic radial law on [0, s_max]. Requires sigma > 0 and T >= 1000.
RadialHistogram empirical_radial_density(const Params& p, std::uint64_t seed, double T, int bins,
                                         const DensityOptions& opts = {});

/// Sum of absolute bin differences between two empirical histograms on the same bins.
double histogram_l1(const RadialHistogram& lhs, const RadialHistogram& rhs);

/// CSV `x,y`.
void write_cloud_csv(std::ostream& os, const Cloud& cloud);
/// CSV `checkpoint_T,diameter`.
void write_diameter_csv(std::ostream& os, const PullbackResult& result);
/// CSV `s_lo,s_hi,empirical,analytic`.
void write_histogram_csv(std::ostream& os, const RadialHistogram& hist);

}  // namespace hopf
