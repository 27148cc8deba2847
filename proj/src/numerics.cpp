#include "hopf/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace hopf {

namespace {

double simpson_step(const std::function<double(double)>& f, double lo, double hi, double f_lo,
                    double f_mid, double f_hi, double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double f_lm = f(lm), f_rm = f(rm);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_step(f, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1) +
           simpson_step(f, mid, hi, f_mid, f_rm, f_hi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double tol,
                          int max_depth) {
    if (!(hi > lo)) return 0.0;
    // Start from a uniform split so narrow peaks are not missed by the first Simpson panel.
    constexpr int panels = 64;
    const double h = (hi - lo) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double a = lo + i * h, b = (i + 1 == panels) ? hi : a + h;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson_step(f, a, b, fa, fm, fb, whole, tol / panels, max_depth);
    }
    return total;
}

double integrate_half_line(const std::function<double(double)>& f, double tol) {
    // Double the cutoff until the integrand is negligible there.
    double hi = 1.0;
    while (hi < 1e6 && (std::abs(f(hi)) > 1e-300 || std::abs(f(0.5 * hi)) > 1e-300)) hi *= 2.0;
    return integrate_adaptive(f, 0.0, hi, tol);
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double student_t975(std::size_t dof) {
    if (dof == 0) throw std::invalid_argument("student_t975: need at least one degree of freedom");
    // Cornish-Fisher expansion about the normal quantile; below 2e-4 absolute error for dof >= 5.
    if (dof < 5) {
        constexpr double small[] = {12.706204736, 4.302652730, 3.182446305, 2.776445105};
        return small[dof - 1];
    }
    const double z = 1.959963984540054, v = static_cast<double>(dof);
    const double z2 = z * z, z3 = z2 * z, z5 = z3 * z2, z7 = z5 * z2, z9 = z7 * z2;
    return z + (z3 + z) / (4.0 * v) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * v * v) +
           (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * v * v * v) +
           (79.0 * z9 + 776.0 * z7 + 1482.0 * z5 - 1920.0 * z3 - 945.0 * z) / (92160.0 * v * v * v * v);
}

BatchMeans batch_means(std::span<const double> batch_values) {
    BatchMeans out;
    out.batches = batch_values.size();
    if (batch_values.empty()) throw std::invalid_argument("batch_means: no batches");
    out.mean = pairwise_sum(batch_values) / static_cast<double>(batch_values.size());
    if (batch_values.size() < 2) return out;
    std::vector<double> sq(batch_values.size());
    for (std::size_t i = 0; i < batch_values.size(); ++i) {
        const double d = batch_values[i] - out.mean;
        sq[i] = d * d;
    }
    const double n = static_cast<double>(batch_values.size());
    const double var = pairwise_sum(sq) / (n - 1.0);
    out.ci_halfwidth = student_t975(batch_values.size() - 1) * std::sqrt(var / n);
    return out;
}

}  // namespace hopf
