#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace hopf {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;

using State = Vec2<double>;
using Mat2 = Mat2T<double>;

/// Constants of the noisy Hopf normal form
///   dZ = (A Z - |Z|^2 B Z) dt + sigma dW,  A = [[alpha,-beta],[beta,alpha]],  B = [[a,-b],[b,a]].
/// Construction rejects a <= 0, sigma < 0 and non-finite values.
class Params {
public:
    Params(double alpha, double beta, double a, double b, double sigma);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double a() const { return a_; }
    double b() const { return b_; }
    double sigma() const { return sigma_; }

    Params with_alpha(double v) const { return {v, beta_, a_, b_, sigma_}; }
    Params with_b(double v) const { return {alpha_, beta_, a_, v, sigma_}; }
    Params with_sigma(double v) const { return {alpha_, beta_, a_, b_, v}; }

    friend bool operator==(const Params&, const Params&) = default;

private:
    double alpha_, beta_, a_, b_, sigma_;
};

/// Drift f(Z) = A Z - |Z|^2 B Z.
template <typename Derived>
Vec2<typename Derived::Scalar> drift(const Params& p, const Eigen::MatrixBase<Derived>& z) {
    using S = typename Derived::Scalar;
    const S x = z(0), y = z(1);
    const S r2 = x * x + y * y;
    const S al = S(p.alpha()), be = S(p.beta()), a = S(p.a()), b = S(p.b());
    return Vec2<S>(al * x - be * y - r2 * (a * x - b * y),
                   be * x + al * y - r2 * (b * x + a * y));
}

/// Df(x, y).
template <typename Derived>
Mat2T<typename Derived::Scalar> jacobian(const Params& p, const Eigen::MatrixBase<Derived>& z) {
    using S = typename Derived::Scalar;
    const S x = z(0), y = z(1);
    const S al = S(p.alpha()), be = S(p.beta()), a = S(p.a()), b = S(p.b());
    const S xx = x * x, yy = y * y, xy = x * y;
    Mat2T<S> m;
    m << al - 3 * a * xx - a * yy + 2 * b * xy, -be - 2 * a * xy + b * xx + 3 * b * yy,
         be - 3 * b * xx - b * yy - 2 * a * xy, al - a * xx - 3 * a * yy - 2 * b * xy;
    return m;
}

/// Eigenvalues (min, max) of the symmetric part (M + M^T)/2 of a 2x2 matrix.
template <typename Derived>
Vec2<typename Derived::Scalar> symmetric_part_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
    using S = typename Derived::Scalar;
    using std::hypot;
    const S off = (m(0, 1) + m(1, 0)) / 2;
    const S mid = (m(0, 0) + m(1, 1)) / 2;
    const S rad = hypot((m(0, 0) - m(1, 1)) / 2, off);
    return Vec2<S>(mid - rad, mid + rad);
}

/// lambda^+(Z) = max_{|r|=1} <Df(Z) r, r>.
template <typename Derived>
typename Derived::Scalar lambda_plus(const Params& p, const Eigen::MatrixBase<Derived>& z) {
    return symmetric_part_eigenvalues(jacobian(p, z))(1);
}

/// lambda^-(Z) = min_{|r|=1} <Df(Z) r, r>.
template <typename Derived>
typename Derived::Scalar lambda_minus(const Params& p, const Eigen::MatrixBase<Derived>& z) {
    return symmetric_part_eigenvalues(jacobian(p, z))(0);
}

// Closed-form quantities of the stationary law. All require sigma > 0 and
// throw std::invalid_argument otherwise.

/// Normalisation constant K of the stationary density,
///   K = sqrt(2a) exp(-alpha^2/(2 a sigma^2)) / (pi^{3/2} sigma erfc(-alpha/(sigma sqrt(2a)))).
double normalization_K(const Params& p);

/// The constant printed in the literature, 2 sqrt(2a) / (sqrt(pi) sigma erfc(-alpha/sqrt(2 a sigma^2))).
/// Kept for the normalisation audit in `verify`; it does not normalise the density.
double normalization_K_literature(const Params& p);

/// pi K sigma^2, the quantity every bound below is written in.
double scaled_normalization(const Params& p);

/// p(x, y) = K exp((2 alpha |Z|^2 - a |Z|^4) / (2 sigma^2)).
double stationary_density(const Params& p, const State& z);

/// Density of s = x^2 + y^2 under the stationary law: pi K exp((2 alpha s - a s^2)/(2 sigma^2)).
double radial_density(const Params& p, double s);

/// P(x^2 + y^2 <= s) under the stationary law, in closed form.
double radial_cdf(const Params& p, double s);

/// P(x^2 + y^2 > s), computed directly so small tails keep their relative accuracy.
double radial_survival(const Params& p, double s);

/// E[x^2 + y^2] = (alpha + pi K sigma^2) / a.
double expected_squared_radius(const Params& p);

/// Sum of both Lyapunov exponents, -2 alpha - 4 sqrt(a) |sigma| exp(-alpha^2/(2 a sigma^2)) / int_{-alpha/(|sigma| sqrt a)}^inf e^{-r^2/2} dr.
double lambda_sum_closed_form(const Params& p);

/// Shear threshold below which the top exponent is negative: a sqrt(q (q + 2)),
/// q = pi K sigma^2 / (alpha + pi K sigma^2). Throws BoundUndefinedError if alpha + pi K sigma^2 <= 0.
double kappa(const Params& p);

/// -pi K sigma^2 + (sqrt(1 + b^2/a^2) - 1)(alpha + pi K sigma^2); strict upper bound for lambda_top.
double lyapunov_upper_bound(const Params& p);

}  // namespace hopf
