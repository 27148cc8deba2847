#include "hopf/model.hpp"

#include "hopf/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hopf {

namespace {

void require_noise(const Params& p, const char* what) {
    if (!(p.sigma() > 0.0))
        throw std::invalid_argument(std::string(what) + ": requires sigma > 0");
}

// exp(-x^2) / erfc(x). For large x both factors underflow, so the asymptotic
// series of erfcx is used there (truncation error below 1e-14 at x = 25).
double gauss_over_erfc(double x) {
    if (x < 25.0) return std::exp(-x * x) / std::erfc(x);
    const double u = 1.0 / (2.0 * x * x);
    const double series = 1.0 - u * (1.0 - 3.0 * u * (1.0 - 5.0 * u * (1.0 - 7.0 * u * (1.0 - 9.0 * u))));
    return x * std::sqrt(std::numbers::pi) / series;
}

// The radial variable s = x^2 + y^2 is a Normal(alpha/a, sigma^2/a) truncated to
// s >= 0; every closed form below goes through this argument.
double truncation_arg(const Params& p) {
    return -p.alpha() / (p.sigma() * std::sqrt(2.0 * p.a()));
}

}  // namespace

Params::Params(double alpha, double beta, double a, double b, double sigma)
    : alpha_(alpha), beta_(beta), a_(a), b_(b), sigma_(sigma) {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(a) || !std::isfinite(b) ||
        !std::isfinite(sigma))
        throw std::invalid_argument("Params: all constants must be finite");
    if (!(a > 0.0)) throw std::invalid_argument("Params: a must be positive");
    if (!(sigma >= 0.0)) throw std::invalid_argument("Params: sigma must be non-negative");
}

double normalization_K(const Params& p) {
    require_noise(p, "normalization_K");
    using std::numbers::pi;
    return std::sqrt(2.0 * p.a()) * gauss_over_erfc(truncation_arg(p)) / (pi * std::sqrt(pi) * p.sigma());
}

double normalization_K_literature(const Params& p) {
    require_noise(p, "normalization_K_literature");
    using std::numbers::pi;
    return 2.0 * std::sqrt(2.0 * p.a()) / (std::sqrt(pi) * p.sigma() * std::erfc(truncation_arg(p)));
}

double scaled_normalization(const Params& p) {
    require_noise(p, "scaled_normalization");
    return std::numbers::pi * normalization_K(p) * p.sigma() * p.sigma();
}

double stationary_density(const Params& p, const State& z) {
    require_noise(p, "stationary_density");
    const double s = z.squaredNorm();
    return normalization_K(p) *
           std::exp((2.0 * p.alpha() * s - p.a() * s * s) / (2.0 * p.sigma() * p.sigma()));
}

double radial_density(const Params& p, double s) {
    require_noise(p, "radial_density");
    if (s < 0.0) return 0.0;
    return std::numbers::pi * normalization_K(p) *
           std::exp((2.0 * p.alpha() * s - p.a() * s * s) / (2.0 * p.sigma() * p.sigma()));
}

double radial_survival(const Params& p, double s) {
    require_noise(p, "radial_survival");
    if (s <= 0.0) return 1.0;
    // s ~ Normal(alpha/a, sigma^2/a) conditioned on s >= 0.
    const double scale = p.sigma() * std::sqrt(2.0 / p.a());
    const double mean = p.alpha() / p.a();
    return std::erfc((s - mean) / scale) / std::erfc(-mean / scale);
}

double radial_cdf(const Params& p, double s) { return 1.0 - radial_survival(p, s); }

double expected_squared_radius(const Params& p) {
    return (p.alpha() + scaled_normalization(p)) / p.a();
}

double lambda_sum_closed_form(const Params& p) {
    require_noise(p, "lambda_sum_closed_form");
    using std::numbers::pi;
    // int_{-alpha/(s sqrt a)}^inf exp(-r^2/2) dr = sqrt(pi/2) erfc(-alpha / (s sqrt(2a)))
    return -2.0 * p.alpha() -
           4.0 * std::sqrt(p.a()) * std::abs(p.sigma()) * gauss_over_erfc(truncation_arg(p)) / std::sqrt(pi / 2.0);
}

double kappa(const Params& p) {
    const double pk = scaled_normalization(p);
    const double denom = p.alpha() + pk;
    if (!(denom > 0.0))
        throw BoundUndefinedError("kappa: alpha + pi K sigma^2 <= 0, bound undefined");
    const double q = pk / denom;
    return p.a() * std::sqrt(q * (q + 2.0));
}

double lyapunov_upper_bound(const Params& p) {
    const double pk = scaled_normalization(p);
    const double ratio = p.b() / p.a();
    return -pk + (std::sqrt(1.0 + ratio * ratio) - 1.0) * (p.alpha() + pk);
}

}  // namespace hopf
