#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace hopf {

/// Adaptive Simpson quadrature of f on [lo, hi] to absolute tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double tol,
                          int max_depth = 50);

/// Integral of f over [0, inf) for an integrand with a Gaussian-type tail.
/// The domain is cut where f has decayed below 1e-300 relative to its peak scale.
double integrate_half_line(const std::function<double(double)>& f, double tol);

/// Pairwise (cascade) summation; order-independent of how the caller partitioned work.
double pairwise_sum(std::span<const double> values);

struct BatchMeans {
    double mean = 0.0;
    double ci_halfwidth = 0.0;  // 95 %, Student t with (batches - 1) dof
    std::size_t batches = 0;
};

/// Mean and 95 % confidence half-width of independent batch values.
BatchMeans batch_means(std::span<const double> batch_values);

/// Two-sided 97.5 % Student t quantile.
double student_t975(std::size_t dof);

}  // namespace hopf
