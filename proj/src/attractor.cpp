#include "hopf/attractor.hpp"

#include "hopf/errors.hpp"
#include "hopf/parallel.hpp"
#include "hopf/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace hopf {

namespace {

constexpr std::uint64_t kStationaryTag = 0x53544154494f4eULL;
constexpr std::uint64_t kCloudTag = 0x434c4f5544ULL;
constexpr std::uint64_t kTrialTag = 0x545249414cULL;

double cross(const State& o, const State& a, const State& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

// Andrew's monotone chain.
std::vector<State> convex_hull(const Samples2& points) {
    std::vector<State> pts(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index i = 0; i < points.cols(); ++i) pts[static_cast<std::size_t>(i)] = points.col(i);
    std::sort(pts.begin(), pts.end(), [](const State& l, const State& r) {
        return l(0) < r(0) || (l(0) == r(0) && l(1) < r(1));
    });
    if (pts.size() < 3) return pts;
    std::vector<State> hull(2 * pts.size());
    std::size_t k = 0;
    for (const State& q : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], q) <= 0.0) --k;
        hull[k++] = q;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    // Collinear input collapses the hull to its two extreme points; keep them.
    if (hull.size() < 2) return {pts.front(), pts.back()};
    return hull;
}

double radial_support(const Params& p) {
    const double mean = p.alpha() / p.a(), sd = p.sigma() / std::sqrt(p.a());
    double s = std::max(mean, 0.0) + 8.0 * sd;
    while (radial_survival(p, s) >= 1e-12) s += sd;
    return s;
}

}  // namespace

double diameter(const Samples2& points) {
    if (points.cols() < 2) return 0.0;
    const std::vector<State> hull = convex_hull(points);
    double best = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i)
        for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, (hull[i] - hull[j]).norm());
    return best;
}

State centroid(const Samples2& points) { return points.rowwise().mean(); }

RadialSampler::RadialSampler(const Params& p, int nodes) {
    if (!(p.sigma() > 0.0)) throw std::invalid_argument("RadialSampler: requires sigma > 0");
    if (nodes < 2) throw std::invalid_argument("RadialSampler: need at least two nodes");
    s_max_ = radial_support(p);
    cdf_.resize(static_cast<std::size_t>(nodes) + 1);
    for (int i = 0; i <= nodes; ++i) cdf_[static_cast<std::size_t>(i)] = radial_cdf(p, s_max_ * i / nodes);
}

double RadialSampler::quantile(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= cdf_.back()) return s_max_;
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto hi = static_cast<std::size_t>(it - cdf_.begin());
    const std::size_t lo = hi - 1;
    const double h = s_max_ / static_cast<double>(cdf_.size() - 1);
    const double span = cdf_[hi] - cdf_[lo];
    const double w = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
    return h * (static_cast<double>(lo) + w);
}

Cloud sample_stationary(const Params& p, std::size_t n, std::uint64_t seed) {
    if (!(p.sigma() > 0.0)) throw std::invalid_argument("sample_stationary: requires sigma > 0");
    const RadialSampler sampler(p);
    const CounterRng rng(derive_key(seed, kStationaryTag));
    Cloud cloud{Samples2(2, static_cast<Eigen::Index>(n)), 0.0, seed};
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::sqrt(sampler.quantile(rng.uniform(2 * i)));
        const double angle = 2.0 * std::numbers::pi * rng.uniform(2 * i + 1);
        cloud.states.col(static_cast<Eigen::Index>(i)) = State(r * std::cos(angle), r * std::sin(angle));
    }
    return cloud;
}

PullbackResult pullback_cloud(const Params& p, std::uint64_t seed, double T, std::size_t n,
                              std::vector<double> checkpoints, const PullbackOptions& opts) {
    if (!(T > 0.0)) throw std::invalid_argument("pullback_cloud: T must be positive");
    if (n < 1) throw std::invalid_argument("pullback_cloud: need at least one point");
    for (double c : checkpoints)
        if (!(c > 0.0 && c <= T)) throw std::invalid_argument("pullback_cloud: checkpoints must lie in (0, T]");
    if (std::find(checkpoints.begin(), checkpoints.end(), T) == checkpoints.end()) checkpoints.push_back(T);
    std::sort(checkpoints.begin(), checkpoints.end());

    const double end = opts.end_time;
    const WienerPath path = sample_path(seed, end - T, end, opts.dt);
    const std::uint64_t cloud_seed = opts.cloud_seed != 0 ? opts.cloud_seed : derive_key(seed, kCloudTag);

    PullbackResult out;
    out.initial = sample_stationary(p, n, cloud_seed);
    out.initial.time_label = end - T;
    out.checkpoints = checkpoints;
    out.sync_epsilon = opts.sync_epsilon;
    out.T = T;

    const auto np = static_cast<Eigen::Index>(n);
    std::vector<Samples2> finals(checkpoints.size(), Samples2(2, np));
    std::vector<char> blown(n, 0);
    parallel_for(n, opts.threads, [&](std::size_t i) {
        const State z0 = out.initial.states.col(static_cast<Eigen::Index>(i));
        for (std::size_t c = 0; c < checkpoints.size(); ++c) {
            try {
                finals[c].col(static_cast<Eigen::Index>(i)) = flow_endpoint(p, path, z0, TimeSpan{end - checkpoints[c], end});
            } catch (const BlowUpError&) {
                blown[i] = 1;
                finals[c].col(static_cast<Eigen::Index>(i)).setConstant(std::numeric_limits<double>::quiet_NaN());
            }
        }
    });
    out.blown_up = static_cast<std::size_t>(std::count(blown.begin(), blown.end(), 1));
    out.failed = out.blown_up > 0;

    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        out.diameters.push_back(out.failed ? std::numeric_limits<double>::infinity() : diameter(finals[c]));
        out.clouds.push_back(Cloud{std::move(finals[c]), end, seed});
    }
    out.final_cloud = out.clouds.back();
    out.synchronised = !out.failed && out.diameters.back() < opts.sync_epsilon;
    return out;
}

EquilibriumEstimate random_equilibrium_point(const Params& p, std::uint64_t seed, double T,
                                             const PullbackOptions& opts) {
    const PullbackResult r = pullback_cloud(p, seed, T, 32, {}, opts);
    if (r.failed) throw BlowUpError(opts.end_time, std::numeric_limits<double>::infinity());
    EquilibriumEstimate out;
    out.point = centroid(r.final_cloud.states);
    out.diameter = r.diameters.back();
    out.T = T;
    out.collapsed = out.diameter <= opts.sync_epsilon;
    return out;
}

double synchronisation_rate(const Params& p, std::uint64_t seed, const State& u, const State& v, double T,
                            double dt) {
    if (u == v) throw std::invalid_argument("synchronisation_rate: U and V must differ");
    const WienerPath path = sample_path(seed, 0.0, T, dt);
    const Eigen::VectorXd d = two_point_distance(p, path, u, v);
    const double d0 = d(0);
    if (!(d.minCoeff() < 0.5 * d0)) throw NoDecayError("synchronisation_rate: distance never halves");

    // Regression over the stretch before d reaches the 1e-12 floor, skipping points above d(0).
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (Eigen::Index k = 0; k < d.size() && d(k) >= 1e-12; ++k) {
        if (d(k) > d0) continue;
        const double t = path.time(k), y = std::log(d(k));
        n += 1;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double denom = n * stt - st * st;
    if (n < 2 || denom <= 0.0) throw NoDecayError("synchronisation_rate: not enough points for a fit");
    return (n * sty - st * sy) / denom;
}

double contraction_ratio(const Params& p, const WienerPath& path, const State& u, const State& v) {
    const Eigen::VectorXd d = two_point_distance(p, path, u, v);
    if (d(0) == 0.0) return 0.0;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < d.size(); ++k) {
        const double t = path.time(k) - path.t0();
        worst = std::max(worst, d(k) / (std::exp(p.alpha() * t) * d(0)));
    }
    return worst;
}

ContractionReport uniform_contraction_check(const Params& p, std::size_t trials, double T, std::uint64_t seed0,
                                            double dt) {
    ContractionReport report;
    report.trials = trials;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t seed = seed0 + i;
        const CounterRng rng(derive_key(seed, kTrialTag));
        auto coord = [&](std::uint64_t c) { return -2.0 + 4.0 * rng.uniform(c); };
        const State u(coord(0), coord(1)), v(coord(2), coord(3));
        const double ratio = contraction_ratio(p, sample_path(seed, 0.0, T, dt), u, v);
        report.worst_ratio = std::max(report.worst_ratio, ratio);
        if (ratio > 1.0 + report.tolerance) ++report.violations;
    }
    return report;
}

RadialHistogram empirical_radial_density(const Params& p, std::uint64_t seed, double T, int bins,
                                         const DensityOptions& opts) {
    if (!(p.sigma() > 0.0)) throw std::invalid_argument("empirical_radial_density: requires sigma > 0");
    if (!(T >= 1000.0)) throw std::invalid_argument("empirical_radial_density: requires T >= 1000");
    if (bins < 1) throw std::invalid_argument("empirical_radial_density: need at least one bin");

    const double s_max = radial_support(p);
    const double width = s_max / bins;
    RadialHistogram h;
    for (int i = 0; i < bins; ++i) {
        h.s_lo.push_back(width * i);
        h.s_hi.push_back(i + 1 == bins ? s_max : width * (i + 1));
        h.analytic.push_back(radial_cdf(p, h.s_hi.back()) - radial_cdf(p, h.s_lo.back()));
    }

    const WienerPath path = sample_path(seed, 0.0, T, opts.dt);
    const auto burn = static_cast<Eigen::Index>(path.grid_index(opts.burn_in));
    State z = sample_stationary(p, 1, seed).states.col(0);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    std::uint64_t total = 0;
    for (Eigen::Index k = 0; k < path.steps(); ++k) {
        z = euler_maruyama_step(p, z, path.increment(k), path.dt());
        if (!(z.norm() <= kBlowUpNorm)) throw BlowUpError(path.time(k + 1), z.norm());
        if (k + 1 <= burn) continue;
        ++total;
        const double s = z.squaredNorm();
        if (s >= s_max) continue;
        const auto bin = std::min(static_cast<std::size_t>(s / width), counts.size() - 1);
        ++counts[bin];
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        h.empirical.push_back(static_cast<double>(counts[i]) / static_cast<double>(total));
        h.l1 += std::abs(h.empirical[i] - h.analytic[i]);
    }
    return h;
}

double histogram_l1(const RadialHistogram& lhs, const RadialHistogram& rhs) {
    if (lhs.s_hi != rhs.s_hi) throw std::invalid_argument("histogram_l1: histograms use different bins");
    double l1 = 0.0;
    for (std::size_t i = 0; i < lhs.empirical.size(); ++i) l1 += std::abs(lhs.empirical[i] - rhs.empirical[i]);
    return l1;
}

void write_cloud_csv(std::ostream& os, const Cloud& cloud) {
    const auto old = os.precision(17);
    os << "x,y\n";
    for (Eigen::Index i = 0; i < cloud.size(); ++i) os << cloud.states(0, i) << ',' << cloud.states(1, i) << '\n';
    os.precision(old);
}

void write_diameter_csv(std::ostream& os, const PullbackResult& result) {
    const auto old = os.precision(17);
    os << "checkpoint_T,diameter\n";
    for (std::size_t i = 0; i < result.checkpoints.size(); ++i)
        os << result.checkpoints[i] << ',' << result.diameters[i] << '\n';
    os.precision(old);
}

void write_histogram_csv(std::ostream& os, const RadialHistogram& hist) {
    const auto old = os.precision(17);
    os << "s_lo,s_hi,empirical,analytic\n";
    for (std::size_t i = 0; i < hist.s_lo.size(); ++i)
        os << hist.s_lo[i] << ',' << hist.s_hi[i] << ',' << hist.empirical[i] << ',' << hist.analytic[i] << '\n';
    os.precision(old);
}

}  // namespace hopf
