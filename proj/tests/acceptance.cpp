// Acceptance run: one PASS/FAIL line per criterion, informational lines prefixed "info".
// Usage: acceptance [criterion numbers...]   (default: all)

#include "hopf/attractor.hpp"
#include "hopf/cli.hpp"
#include "hopf/errors.hpp"
#include "hopf/flow.hpp"
#include "hopf/lyapunov.hpp"
#include "hopf/model.hpp"
#include "hopf/noise.hpp"
#include "hopf/numerics.hpp"
#include "hopf/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace hopf;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void info(const std::string& s) { std::printf("  info  %s\n", s.c_str()); std::fflush(stdout); }

Params model(double alpha, double b) { return Params(alpha, 1.0, 1.0, b, 1.0); }

const std::vector<Params> kGrid27 = [] {
    std::vector<Params> g;
    for (double alpha : {-2.0, 0.0, 2.0})
        for (double a : {0.5, 1.0, 2.0})
            for (double sigma : {0.5, 1.0, 2.0}) g.emplace_back(alpha, 1.0, a, 1.0, sigma);
    return g;
}();

Outcome c1_kappa() {
    const char* argv[] = {"hopf_lab", "bounds", "--a", "1", "--alpha", "0", "--sigma", "1"};
    std::ostringstream out, err;
    const int code = cli::run(8, argv, out, err);
    const std::string text = out.str();
    const auto pos = text.find("kappa = ");
    if (code != 0 || pos == std::string::npos) return {false, "bounds did not print kappa"};
    const double k = std::stod(text.substr(pos + 8));
    const double gap = std::abs(k - std::sqrt(3.0));
    return {gap <= 1e-12, fmt("kappa = %.17g, |kappa - sqrt3| = %.2e (tol 1e-12)", k, gap)};
}

Outcome c2_density() {
    double worst = 0.0, worst_factor = 0.0;
    for (const Params& p : kGrid27) {
        const double mass = integrate_half_line([&](double s) { return radial_density(p, s); }, 1e-13);
        worst = std::max(worst, std::abs(mass - 1.0));
        const double factor = 2 * M_PI * std::exp(p.alpha() * p.alpha() / (2 * p.a() * p.sigma() * p.sigma()));
        worst_factor = std::max(worst_factor,
                                std::abs(normalization_K_literature(p) / normalization_K(p) / factor - 1.0));
    }
    const char* argv[] = {"hopf_lab", "verify"};
    std::ostringstream out, err;
    cli::run(2, argv, out, err);
    const bool logged = out.str().find("literature K off by 2 pi exp(alpha^2/(2 a sigma^2))") != std::string::npos;
    return {worst <= 1e-8 && worst_factor < 1e-12 && logged,
            fmt("max |mass - 1| = %.2e (tol 1e-8); literature K / K = 2 pi e^{..} to %.1e; verify logs it: %s", worst,
                worst_factor, logged ? "yes" : "no")};
}

Outcome c3_lambda_sum() {
    double worst = 0.0;
    for (const Params& p : kGrid27) {
        const double Es = integrate_half_line([&](double s) { return s * radial_density(p, s); }, 1e-13);
        worst = std::max(worst, std::abs(lambda_sum_closed_form(p) - (2 * p.alpha() - 4 * p.a() * Es)));
    }
    const double target = -3.19154;
    bool inside = true;
    std::vector<LyapunovEstimate> est;
    std::string detail = fmt("closed form vs 2 alpha - 4 a E[s]: %.2e (tol 1e-8)", worst);
    for (double b : {1.0, 8.0}) {
        est.push_back(lambda_sum_estimate(model(0.0, b), 1, 1e4));
        const auto& e = est.back();
        inside = inside && std::abs(e.value - target) <= e.ci_halfwidth;
        detail += fmt("; b=%g: %.5f +- %.5f", b, e.value, e.ci_halfwidth);
    }
    const double joint = std::hypot(est[0].ci_halfwidth, est[1].ci_halfwidth);
    const double diff = std::abs(est[0].value - est[1].value);
    detail += fmt("; |diff| = %.5f vs joint CI %.5f", diff, joint);
    LyapunovOptions fine;
    fine.dt = 2.5e-4;
    const LyapunovEstimate e8 = lambda_sum_estimate(model(0.0, 8.0), 1, 1e4, fine);
    info(fmt("b=8 at dt = 2.5e-4: lambda_sum = %.5f +- %.5f", e8.value, e8.ci_halfwidth));
    return {worst <= 1e-8 && inside && diff <= joint, detail};
}

Outcome c4_sign_structure() {
    struct Point {
        double alpha, b;
        int sign;
    };
    bool ok = true;
    std::string detail;
    for (const Point& pt : {Point{-1, 1, -1}, Point{1, 1, -1}, Point{-1, 20, 1}, Point{1, 8, 1}}) {
        if (!detail.empty()) detail += "; ";
        try {
            const CertifiedEstimate ce = top_lyapunov_certified(model(pt.alpha, pt.b), 1, 1e4);
            const auto& e = ce.estimate;
            const bool good = ce.determined && (e.value < 0 ? -1 : 1) == pt.sign;
            ok = ok && good;
            detail += fmt("(%g,%g): %.4f +- %.4f%s", pt.alpha, pt.b, e.value, e.ci_halfwidth, good ? "" : " WRONG");
        } catch (const NumericalError& err) {
            ok = false;
            detail += fmt("(%g,%g): blow-up", pt.alpha, pt.b);
        }
    }
    LyapunovOptions fine;
    fine.dt = 5e-4;
    const LyapunovEstimate e = top_lyapunov(model(-1, 20), 1, 1e4, fine);
    info(fmt("(-1,20) at dt = 5e-4: lambda_top = %.4f +- %.4f", e.value, e.ci_halfwidth));
    return {ok, detail};
}

Outcome c5_small_shear() {
    struct Point {
        double alpha, b_over_kappa;
    };
    bool ok = true;
    std::string detail;
    for (const Point& pt : {Point{-1, 0.9}, Point{0, 0.9}, Point{1, 0.9}, Point{0.5, 0.5}, Point{2, 0.0}}) {
        const double k = kappa(model(pt.alpha, 0.0));
        const Params p = model(pt.alpha, pt.b_over_kappa * k);
        const LyapunovEstimate e = top_lyapunov_certified(p, 2, 1e4).estimate;
        const double ub = lyapunov_upper_bound(p);
        const bool good = e.value < 0.0 && e.value - e.ci_halfwidth <= ub;
        ok = ok && good;
        if (!detail.empty()) detail += "; ";
        detail += fmt("(%g,%.3f): %.4f +- %.4f <= %.4f%s", pt.alpha, p.b(), e.value, e.ci_halfwidth, ub, good ? "" : " WRONG");
    }
    return {ok, detail};
}

Outcome c6_contraction() {
    const ContractionReport r = uniform_contraction_check(model(-1, 1), 100, 20.0);
    return {r.violations == 0 && r.trials == 100,
            fmt("%zu violations in %zu trials, worst d(t)/(e^{alpha t} d(0)) = %.9f", r.violations, r.trials,
                r.worst_ratio)};
}

Outcome c7_ftle_dichotomy() {
    bool ok = true;
    std::string detail;
    for (double T : {2.0, 5.0, 10.0}) {
        const FtleDistribution stable = ftle_distribution(model(-1, 0.5), 10000, T, 7);
        const FtleDistribution unstable = ftle_distribution(model(1, 0.5), 10000, T, 8);
        double max_stable = -INFINITY;
        for (const auto& s : stable.samples) max_stable = std::max(max_stable, s.sup_value);
        std::size_t pos = 0;
        for (const auto& s : unstable.samples) pos += s.sup_value > 0.0;
        const double frac = static_cast<double>(pos) / static_cast<double>(unstable.samples.size());
        const bool good = stable.failures == 0 && unstable.failures == 0 && stable.samples.size() == 10000 &&
                          max_stable <= -1.0 && pos > 0;
        ok = ok && good;
        if (!detail.empty()) detail += "; ";
        detail += fmt("T=%g: max sup(alpha=-1) = %.4f, frac sup>0 (alpha=1) = %.4f", T, max_stable, frac);
    }
    return {ok, detail};
}

Outcome c8_dichotomy_proxy() {
    const double alpha = 0.5;
    const std::vector<double> Ts = {2.0, 5.0, 10.0, 20.0, 50.0};
    const auto pts = dichotomy_sup_estimate(model(alpha, 0.5), 1000, Ts, 11);
    bool positive = true, decreasing = true;
    std::string detail;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        positive = positive && pts[k].max_ftle > 0.0;
        if (k > 0) decreasing = decreasing && pts[k].max_ftle <= pts[k - 1].max_ftle;
        detail += fmt("%sT=%g: %.4f", k ? ", " : "max sup ", pts[k].T, pts[k].max_ftle);
    }
    const double last = pts.back().max_ftle;
    const bool window = last >= alpha && last <= alpha + 0.5;
    return {positive && decreasing && window,
            detail + fmt("; positive %s, decreasing %s, T=50 in [0.5, 1.0] %s", positive ? "yes" : "no",
                         decreasing ? "yes" : "no", window ? "yes" : "no")};
}

Outcome c9_shear_mechanism() {
    const double alpha = 1.0, a = 1.0, b = 5.0;
    const Params p(alpha, 1.0, a, b, 1.0);
    const double w = std::sqrt(20.0 / (2 * (b - 2 * a)));
    const State zp(w, w), e2(0.0, 1.0);
    const double g = directional_growth(p, zp, e2);
    const double T = 0.05;
    const auto [held, tf] = integrate_controlled(p, steering_path_hold(p, zp, T, kDefaultDt), zp);
    const double rate = std::log((tf.matrices.back() * e2).norm()) / T;
    const bool exact = std::abs(g - (alpha + 20.0)) <= 1e-12 * (alpha + 20.0);

    const State mirror(w, -w);
    const auto [h2, tf2] = integrate_controlled(p, steering_path_hold(p, mirror, 0.005, 1e-4), mirror);
    info(fmt("mirrored z' = (w, -w): growth %.12g, rate at T = 0.005, dt = 1e-4: %.4f", directional_growth(p, mirror, e2),
             std::log((tf2.matrices.back() * e2).norm()) / 0.005));
    return {exact && rate >= alpha + 19.5,
            fmt("directional_growth((w,w), e2) = %.12g (want %.12g); rate at T = 0.05: %.4f (want >= %.1f)", g,
                alpha + 20.0, rate, alpha + 19.5)};
}

Outcome c10_pullback() {
    struct Point {
        double alpha, b;
        bool sync;
    };
    bool ok = true;
    std::string detail;
    auto count = [](const Params& p, bool sync, double dt, int& failed) {
        PullbackOptions opts;
        opts.dt = dt;
        int hits = 0;
        failed = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const PullbackResult r = pullback_cloud(p, seed, 50.0, 1000, {}, opts);
            if (r.failed) {
                ++failed;
                continue;
            }
            const double d = r.diameters.back();
            hits += sync ? d < 1e-3 : d > 0.1;
        }
        return hits;
    };
    for (const Point& pt : {Point{-1, 1, true}, Point{1, 1, true}, Point{-1, 20, false}, Point{1, 8, false}}) {
        int failed = 0;
        const int hits = count(model(pt.alpha, pt.b), pt.sync, kDefaultDt, failed);
        ok = ok && hits >= 9;
        if (!detail.empty()) detail += "; ";
        detail += fmt("(%g,%g) %s: %d/10", pt.alpha, pt.b, pt.sync ? "d<1e-3" : "d>0.1", hits);
        if (failed) detail += fmt(" (%d blew up)", failed);
    }
    int failed = 0;
    const int hits = count(model(-1, 20), false, 5e-4, failed);
    info(fmt("(-1,20) at dt = 5e-4: d>0.1 in %d/10 seeds, %d blew up", hits, failed));
    return {ok, detail};
}

Outcome c11_ergodicity() {
    const RadialHistogram h1 = empirical_radial_density(model(1, 1), 3, 1e4, 50);
    const RadialHistogram h8 = empirical_radial_density(model(1, 8), 3, 1e4, 50);
    const double cross = histogram_l1(h1, h8);
    return {h1.l1 < 0.05 && cross < 0.05,
            fmt("L1(b=1 vs analytic) = %.4f, L1(b=1 vs b=8) = %.4f (tol 0.05); b=8 vs analytic %.4f", h1.l1, cross,
                h8.l1)};
}

Outcome c12_ou() {
    const Params p = model(1, 1);
    const State z0(0.7, -0.2);
    double worst = 0.0, spread = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const WienerPath path = sample_path(seed, 0.0, 10.0, 1e-3);
        const Trajectory em = integrate_sde(p, path, z0);
        std::vector<Samples2> ou;
        for (double c : {0.5, 1.0, 2.0}) {
            ou.push_back(integrate_rde_ou(p, path, c, z0).states);
            worst = std::max(worst, (ou.back() - em.states).colwise().norm().maxCoeff());
        }
        for (std::size_t i = 0; i < ou.size(); ++i)
            for (std::size_t j = i + 1; j < ou.size(); ++j)
                spread = std::max(spread, (ou[i] - ou[j]).colwise().norm().maxCoeff());
    }
    return {worst <= 1e-2 && spread <= 2e-2,
            fmt("sup gap vs EM = %.2e (tol 1e-2), across c = %.2e (tol 2e-2)", worst, spread)};
}

Outcome c13_sweep() {
    GridSpec g;  // 17 x 17, b in [0, 10], alpha in [-2, 2]
    const SweepResult one = sweep_top_lyapunov(g, 1);
    info(fmt("sweep with 1 worker: %.0f s", one.cpu_seconds));
    const SweepResult eight = sweep_top_lyapunov(g, 8);
    info(fmt("sweep with 8 workers: %.0f s", eight.cpu_seconds));
    std::ostringstream s1, s8, k1, k8;
    write_sweep_csv(s1, one);
    write_sweep_csv(s8, eight);
    const CurveEstimate curve = zero_contour(one);
    write_curve_csv(k1, curve);
    write_curve_csv(k8, zero_contour(eight));
    bool identical = s1.str() == s8.str() && k1.str() == k8.str();
    for (std::size_t c = 0; c < one.cells.size(); ++c)
        identical = identical && one.cells[c].failed == eight.cells[c].failed &&
                    one.cells[c].refined == eight.cells[c].refined;

    std::size_t failed = 0;
    for (const auto& cell : one.cells) failed += cell.failed;
    bool in_window = false, all_in = true;
    std::string row;
    for (const ContourPoint& pt : curve.points) {
        if (std::abs(pt.alpha - 1.0) > 1e-12) continue;
        if (!pt.determined) {
            row += " undetermined";
            all_in = false;
            continue;
        }
        const bool inside = pt.b_star > 3.0 && pt.b_star < 8.0;
        in_window = in_window || inside;
        all_in = all_in && inside;
        row += fmt(" %.3f in [%g, %g]", pt.b_star, pt.b_lo, pt.b_hi);
    }
    const SweepConsistency cons = check_consistency(one);
    info(fmt("sweep: %zu failed cells, %zu small-shear mismatches, %zu bound violations", failed,
             cons.small_shear_mismatches.size(), cons.bound_violations.size()));
    return {identical && in_window && all_in,
            fmt("1 vs 8 workers bit-identical: %s; alpha=1 zero contour:", identical ? "yes" : "no") + row};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "kappa closed form", 1, c1_kappa},
        {2, "density normalisation", 5, c2_density},
        {3, "lambda_sum cross-validation", 300, c3_lambda_sum},
        {4, "sign structure of lambda_top", 1200, c4_sign_structure},
        {5, "small-shear bound", 1200, c5_small_shear},
        {6, "uniform contraction", 120, c6_contraction},
        {7, "FTLE dichotomy", 600, c7_ftle_dichotomy},
        {8, "dichotomy-spectrum proxy", 600, c8_dichotomy_proxy},
        {9, "shear growth mechanism", 1, c9_shear_mechanism},
        {10, "pullback synchronisation contrast", 600, c10_pullback},
        {11, "ergodicity and b-independence", 300, c11_ergodicity},
        {12, "OU conjugation", 120, c12_ou},
        {13, "sweep reproducibility and contour", 3600, c13_sweep},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : all) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.limit_s;
        const bool pass = o.passed && in_time;
        failures += !pass;
        std::printf("%s  %2d %s: %s [%.1f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.limit_s, in_time ? "" : ", over");
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
