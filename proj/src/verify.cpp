#include "hopf/verify.hpp"

#include "hopf/attractor.hpp"
#include "hopf/flow.hpp"
#include "hopf/lyapunov.hpp"
#include "hopf/model.hpp"
#include "hopf/noise.hpp"
#include "hopf/numerics.hpp"
#include "hopf/random.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace hopf {

namespace {

template <typename T>
std::string fmt(const char* label, T value) {
    std::ostringstream os;
    os << label << std::setprecision(3) << value;
    return os.str();
}

CheckResult density_normalisation() {
    double worst = 0.0, worst_factor_err = 0.0, largest_factor = 0.0;
    for (double alpha : {-2.0, 0.0, 2.0})
        for (double a : {0.5, 1.0, 2.0})
            for (double sigma : {0.5, 1.0, 2.0}) {
                const Params p(alpha, 1.0, a, 1.0, sigma);
                const double mass = integrate_half_line([&](double s) { return radial_density(p, s); }, 1e-13);
                worst = std::max(worst, std::abs(mass - 1.0));
                const double factor = 2 * std::numbers::pi * std::exp(alpha * alpha / (2 * a * sigma * sigma));
                const double ratio = normalization_K_literature(p) / normalization_K(p);
                worst_factor_err = std::max(worst_factor_err, std::abs(ratio / factor - 1.0));
                largest_factor = std::max(largest_factor, ratio);
            }
    std::ostringstream d;
    d << "max |mass - 1| = " << std::setprecision(3) << worst << "; literature K off by 2 pi exp(alpha^2/(2 a sigma^2)) "
      << "(rel. err " << worst_factor_err << ", up to x" << largest_factor << ")";
    return {"density normalisation (27 points)", worst < 1e-8 && worst_factor_err < 1e-12, d.str()};
}

CheckResult lambda_sum_identity() {
    double worst = 0.0;
    for (double alpha : {-2.0, 0.0, 2.0})
        for (double a : {0.5, 1.0, 2.0})
            for (double sigma : {0.5, 1.0, 2.0}) {
                const Params p(alpha, 1.0, a, 1.0, sigma);
                worst = std::max(worst, std::abs(lambda_sum_closed_form(p) -
                                                 (2 * alpha - 4 * a * expected_squared_radius(p))));
            }
    return {"lambda_sum = 2 alpha - 4 a E[s]", worst < 1e-8, fmt("max gap ", worst)};
}

CheckResult kappa_checks() {
    const double k0 = kappa(Params(0.0, 1.0, 1.0, 1.0, 1.0));
    double worst = 0.0;
    for (double alpha : {-1.0, 0.0, 1.0, 2.0}) {
        const Params p(alpha, 1.0, 1.3, 1.0, 0.8);
        worst = std::max(worst, std::abs(lyapunov_upper_bound(p.with_b(kappa(p)))));
    }
    return {"kappa(alpha=0) = sqrt(3) a, bound vanishes at kappa", std::abs(k0 - std::sqrt(3.0)) < 1e-12 && worst < 1e-10,
            fmt("kappa - sqrt3 = ", k0 - std::sqrt(3.0))};
}

CheckResult jacobian_fd() {
    CounterRng rng(derive_key(1, 0xfd));
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const Params p(4 * rng.uniform(5 * i) - 2, 1.0, 0.2 + 2 * rng.uniform(5 * i + 1), 20 * rng.uniform(5 * i + 2) - 10, 1.0);
        const State z(4 * rng.uniform(5 * i + 3) - 2, 4 * rng.uniform(5 * i + 4) - 2);
        Mat2 fd;
        for (int k = 0; k < 2; ++k) {
            State e = State::Zero();
            e(k) = 1e-6;
            fd.col(k) = (drift(p, State(z + e)) - drift(p, State(z - e))) / 2e-6;
        }
        const Mat2 j = jacobian(p, z);
        worst = std::max(worst, (j - fd).cwiseAbs().maxCoeff() / (1 + j.cwiseAbs().maxCoeff()));
    }
    return {"jacobian vs central differences", worst < 1e-6, fmt("max rel gap ", worst)};
}

CheckResult shear_envelope() {
    CounterRng rng(derive_key(2, 0xe0));
    double worst = -INFINITY;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double a = 0.2 + 2 * rng.uniform(5 * i);
        const Params p(2 * rng.uniform(5 * i + 1) - 1, 1.0, a, std::sqrt(3.0) * a * (2 * rng.uniform(5 * i + 2) - 1), 1.0);
        const double th = 2 * std::numbers::pi * rng.uniform(5 * i + 3);
        const State z = 3 * rng.uniform(5 * i + 4) * State(std::cos(th), std::sin(th));
        worst = std::max(worst, lambda_plus(p, z) - p.alpha());
    }
    return {"lambda+ <= alpha for |b| <= sqrt(3) a", worst <= 1e-10, fmt("max lambda+ - alpha = ", worst)};
}

CheckResult svd_identity() {
    CounterRng rng(derive_key(3, 0x5d));
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        Mat2 m;
        m << 4 * rng.uniform(4 * i) - 2, 4 * rng.uniform(4 * i + 1) - 2, 4 * rng.uniform(4 * i + 2) - 2,
            4 * rng.uniform(4 * i + 3) - 2;
        const Vec2<double> s = singular_values(m);
        worst = std::max(worst, std::abs(s(0) * s(0) + s(1) * s(1) - m.squaredNorm()) / m.squaredNorm());
    }
    return {"closed-form SVD: s1^2 + s2^2 = |M|_F^2", worst < 1e-12, fmt("max rel gap ", worst)};
}

CheckResult noise_checks() {
    const WienerPath w = sample_path(7, 0.0, 20.0, 1e-2);
    bool ok = w == sample_path(7, 0.0, 20.0, 1e-2);
    ok = ok && shift(w, 0.0) == w;
    for (double s : {1.0, 2.5})
        for (double t : {0.5, 3.0}) {
            const WienerPath l = shift(shift(w, s), t), r = shift(w, s + t);
            const auto n = std::min(l.steps(), r.steps());
            ok = ok && l.increments().leftCols(n) == r.increments().leftCols(n);
        }
    return {"path determinism and shift semigroup", ok, ok ? "exact" : "mismatch"};
}

CheckResult cocycle_checks() {
    const Params p(1.0, 1.0, 1.0, 3.0, 1.0);
    const WienerPath w = sample_path(11, 0.0, 6.0, 1e-3);
    const State z(0.4, -0.2);
    const State mid = flow_endpoint(p, w, z, TimeSpan{0.0, 2.0});
    const bool exact = flow_endpoint(p, w, z) == flow_endpoint(p, shift(w, 2.0), mid, TimeSpan{0.0, 4.0});
    double spread = 0.0, base = 0.0;
    for (int every : {1, 10, 100}) {
        JointOptions o;
        o.renorm_every = every;
        o.record_blocks = false;
        const double v = integrate_joint(p, w, z, std::nullopt, o).log_r1;
        if (every == 1) base = v;
        spread = std::max(spread, std::abs(v - base));
    }
    return {"cocycle exact on grid, renormalisation invariant", exact && spread < 1e-6,
            fmt("renorm spread ", spread)};
}

CheckResult ou_conjugation() {
    const Params p(1.0, 1.0, 1.0, 1.0, 1.0);
    const WienerPath w = sample_path(3, 0.0, 10.0, 1e-3);
    const State z0(0.5, 0.5);
    const Trajectory em = integrate_sde(p, w, z0);
    double gap = 0.0;
    for (double c : {0.5, 1.0, 2.0})
        gap = std::max(gap, (integrate_rde_ou(p, w, c, z0).states - em.states).colwise().norm().maxCoeff());
    return {"OU-conjugated solution tracks Euler-Maruyama", gap <= 1e-2, fmt("sup gap ", gap)};
}

CheckResult contraction() {
    const ContractionReport r = uniform_contraction_check(Params(-1.0, 1.0, 1.0, 1.0, 1.0), 20, 20.0);
    return {"d(t) <= e^{alpha t} d(0) at alpha=-1, b=1", r.passed(), fmt("worst ratio ", r.worst_ratio)};
}

CheckResult sampler_mean() {
    const Params p(1.0, 1.0, 1.0, 1.0, 1.0);
    const Cloud c = sample_stationary(p, 200000, 5);
    const Eigen::ArrayXd s = c.states.colwise().squaredNorm().transpose().array();
    const double se = std::sqrt((s - s.mean()).square().mean() / static_cast<double>(s.size()));
    const double z = (s.mean() - expected_squared_radius(p)) / se;
    return {"stationary sampler mean of |Z|^2", std::abs(z) < 4.0, fmt("z-score ", z)};
}

}  // namespace

std::vector<CheckResult> run_verify_suite() {
    return {density_normalisation(), lambda_sum_identity(), kappa_checks(), jacobian_fd(), shear_envelope(),
            svd_identity(),          noise_checks(),        cocycle_checks(), ou_conjugation(), contraction(),
            sampler_mean()};
}

bool print_verify_table(std::ostream& os, const std::vector<CheckResult>& results) {
    std::size_t width = 0;
    for (const auto& r : results) width = std::max(width, r.name.size());
    std::size_t failed = 0;
    for (const auto& r : results) {
        os << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << (r.passed ? "PASS" : "FAIL") << "  "
           << r.detail << '\n';
        failed += !r.passed;
    }
    os << results.size() - failed << '/' << results.size() << " checks passed\n";
    return failed == 0;
}

}  // namespace hopf
