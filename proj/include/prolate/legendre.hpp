#ifndef PROLATE_LEGENDRE_HPP
#define PROLATE_LEGENDRE_HPP

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace prolate {
namespace detail {

/// Evaluate a series in orthonormal Legendre polynomials,
///   f(z) = sum_k d_k sqrt(k + 1/2) P_k(z),
/// via the Bonnet recurrence. Valid for all real z (the recurrence is the
/// analytic continuation of the polynomials).
inline double legendre_series(const Eigen::VectorXd& d, double z) {
    const Eigen::Index K = d.size();
    if (K == 0) return 0.0;
    double acc = d[0] * std::sqrt(0.5);
    if (K == 1) return acc;
    double pkm1 = 1.0, pk = z;
    acc += d[1] * std::sqrt(1.5) * pk;
    for (Eigen::Index k = 1; k + 1 < K; ++k) {
        const double pkp1 = ((2 * k + 1) * z * pk - k * pkm1) / (k + 1);
        acc += d[k + 1] * std::sqrt(k + 1.5) * pkp1;
        pkm1 = pk;
        pk = pkp1;
    }
    return acc;
}

/// Derivative of the same series. Uses P_k'(z) from the joint recurrence
///   P_k'(z) = (k z P_k - k P_{k-1}) / (z^2 - 1), with the z = +-1 limit
/// P_k'(+-1) = (+-1)^{k+1} k(k+1)/2 handled separately.
inline double legendre_series_deriv(const Eigen::VectorXd& d, double z) {
    const Eigen::Index K = d.size();
    if (K <= 1) return 0.0;
    if (std::abs(std::abs(z) - 1.0) < 1e-14) {
        const double s = (z > 0) ? 1.0 : -1.0;
        double acc = 0.0;
        for (Eigen::Index k = 1; k < K; ++k) {
            const double pk1 = (k % 2 == 0) ? s : 1.0; // (+-1)^{k+1}: s^{k+1}
            acc += d[k] * std::sqrt(k + 0.5) * pk1 * 0.5 * static_cast<double>(k) * (k + 1);
        }
        return acc;
    }
    double acc = d[1] * std::sqrt(1.5); // P_1' = 1
    double pkm1 = 1.0, pk = z;
    for (Eigen::Index k = 1; k + 1 < K; ++k) {
        const double pkp1 = ((2 * k + 1) * z * pk - k * pkm1) / (k + 1);
        const double dp = (k + 1) * (z * pkp1 - pk) / (z * z - 1.0);
        acc += d[k + 1] * std::sqrt(k + 1.5) * dp;
        pkm1 = pk;
        pk = pkp1;
    }
    return acc;
}

/// sinc kernel rho_W(x) = sin(W x) / (pi x), with rho_W(0) = W / pi.
inline double sinc_kernel(double W, double x) {
    const double a = W * x;
    if (std::abs(a) < 1e-6) {
        // series: (W/pi)(1 - a^2/6 + a^4/120)
        const double a2 = a * a;
        return W / std::numbers::pi * (1.0 - a2 / 6.0 * (1.0 - a2 / 20.0));
    }
    return std::sin(a) / (std::numbers::pi * x);
}

/// d/dx of the sinc kernel: (W cos(Wx) x - sin(Wx)) / (pi x^2),
/// with the x -> 0 limit -W^3 x / (3 pi).
inline double sinc_kernel_deriv(double W, double x) {
    const double a = W * x;
    if (std::abs(a) < 1e-4) {
        const double a2 = a * a;
        return -W * W * a / (3.0 * std::numbers::pi) * (1.0 - a2 / 10.0);
    }
    return (a * std::cos(a) - std::sin(a)) / (std::numbers::pi * x * x);
}

} // namespace detail
} // namespace prolate

#endif
