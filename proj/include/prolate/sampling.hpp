#ifndef PROLATE_SAMPLING_HPP
#define PROLATE_SAMPLING_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "prolate/bounds.hpp"
#include "prolate/pswf.hpp"

namespace prolate {

/// Uniform samples f(k pi / W) for k in [k_min, k_max]; the spacing pi/W is
/// the Nyquist step for the band [-W, W].
struct SampleGrid {
    double W = 1.0;
    int k_min = 0;
    int k_max = -1;
    Eigen::VectorXcd values;

    [[nodiscard]] double spacing() const { return pi / W; }
    [[nodiscard]] int size() const { return k_max - k_min + 1; }
    [[nodiscard]] double node(int k) const { return k * pi / W; }
    [[nodiscard]] std::complex<double> value(int k) const { return values[k - k_min]; }
    [[nodiscard]] bool covers(int k) const { return k >= k_min && k <= k_max; }
};

/// Sample a function on the Nyquist grid of band half-width W.
inline SampleGrid make_sample_grid(double W, int k_min, int k_max,
                                   const std::function<std::complex<double>(double)>& f) {
    if (k_max < k_min) throw validation_error("make_sample_grid: empty index range");
    SampleGrid g;
    g.W = W;
    g.k_min = k_min;
    g.k_max = k_max;
    g.values.resize(g.size());
    for (int k = k_min; k <= k_max; ++k) g.values[k - k_min] = f(k * pi / W);
    return g;
}

/// Truncated Whittaker-Shannon series
///   f(t) ~ (pi/W) sum_k f(k pi/W) rho_W(t - k pi/W).
/// Evaluation at a grid node returns the stored sample exactly.
inline std::complex<double> shannon_interpolate(const SampleGrid& g, double t) {
    if (g.size() <= 0) throw validation_error("shannon_interpolate: empty grid");
    const double h = g.spacing();
    const double kr = t / h;
    const long k0 = std::lround(kr);
    if (std::abs(t - k0 * h) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(1.0, std::abs(t)) &&
        g.covers(static_cast<int>(k0)))
        return g.value(static_cast<int>(k0));
    std::complex<double> acc{0.0, 0.0};
    for (int k = g.k_min; k <= g.k_max; ++k)
        acc += g.value(k) * detail::sinc_kernel(g.W, t - k * h);
    return pi / g.W * acc;
}

/// Truncated prolate sampling series
///   f_{N,c}(t) = (pi/W) sum_{n<N} sum_{|k| <= [T W / pi]}
///                f(k pi/W) xi_n(k pi/W) xi_n(t),
/// using only the samples inside the concentration window.
inline std::complex<double> prolate_sampling_truncated(const PswfBasis& b, const SampleGrid& g,
                                                       int N, double t) {
    if (N < 0 || N > b.count)
        throw dimension_error("prolate_sampling_truncated: N exceeds basis count");
    const int K0 = static_cast<int>(std::floor(b.T() * b.W() / pi));
    if (!g.covers(-K0) || !g.covers(K0))
        throw validation_error("prolate_sampling_truncated: grid narrower than [T W / pi] indices");
    const double h = g.spacing();
    std::complex<double> acc{0.0, 0.0};
    for (int n = 0; n < N; ++n) {
        std::complex<double> coef{0.0, 0.0};
        for (int k = -K0; k <= K0; ++k) coef += g.value(k) * eval_xi(b, n, k * h);
        acc += coef * eval_xi(b, n, t);
    }
    return pi / b.W() * acc;
}

/// Residuals of the discrete orthogonality relations
///   sum_n xi_n(k pi/W) xi_n(l pi/W) = (W/pi) delta_kl,
///   sum_k xi_n(k pi/W) xi_m(k pi/W) = (W/pi) delta_nm.
/// The n-sum runs over the whole basis and is probed at nodes inside
/// [-T, T]; the k-sum runs over |k| <= floor(K T W / pi) and is probed for
/// n, m up to floor(c_tilde)+2. Tail estimates for both truncations are
/// reported alongside.
struct DiscreteOrthogonalityResult {
    double res_kl = 0.0;
    double res_nm = 0.0;
    double tail_estimate_n_sum = 0.0;
    double tail_estimate_k_sum = 0.0;
};

inline DiscreteOrthogonalityResult discrete_orthogonality_residual(const PswfBasis& b, int K) {
    const double T = b.T(), W = b.W();
    if (b.count < static_cast<int>(b.spec.c_tilde) + 20)
        throw dimension_error("discrete_orthogonality_residual: basis count below c_tilde + 20");
    DiscreteOrthogonalityResult out;
    const double h = pi / W;
    const int K0 = static_cast<int>(std::floor(T * W / pi));

    // node-pair residuals (n-sum)
    for (int k = -K0; k <= K0; ++k) {
        for (int l = k; l <= K0; ++l) {
            double s = 0.0;
            for (int n = 0; n < b.count; ++n) s += eval_xi(b, n, k * h) * eval_xi(b, n, l * h);
            const double target = (k == l) ? W / pi : 0.0;
            out.res_kl = std::max(out.res_kl, std::abs(s - target));
        }
    }
    {
        // last-term magnitude at the worst node as truncation estimate
        double worst = 0.0;
        for (int k = -K0; k <= K0; ++k) {
            const double v = eval_xi(b, b.count - 1, k * h);
            worst = std::max(worst, v * v);
        }
        out.tail_estimate_n_sum = worst;
    }

    // index-pair residuals (k-sum)
    const int n_hi = std::min(b.count - 1, static_cast<int>(std::floor(b.spec.c_tilde)) + 2);
    const int k_hi = static_cast<int>(std::floor(K * T * W / pi));
    for (int n = 0; n <= n_hi; ++n) {
        for (int m = n; m <= n_hi; ++m) {
            double s = 0.0;
            for (int k = -k_hi; k <= k_hi; ++k) s += eval_xi(b, n, k * h) * eval_xi(b, m, k * h);
            const double target = (n == m) ? W / pi : 0.0;
            out.res_nm = std::max(out.res_nm, std::abs(s - target));
            // 1/t^2 extrapolation of the truncated tail
            const double last = std::abs(eval_xi(b, n, k_hi * h) * eval_xi(b, m, k_hi * h));
            out.tail_estimate_k_sum = std::max(out.tail_estimate_k_sum, 2.0 * last * k_hi);
        }
    }
    return out;
}

/// Bound on the sample tail sum
///   sum_{|k| >= TW/pi} |f(k pi/W)|^2 <= E + 2 sqrt(E E'),
/// where E, E' are the exterior energies of f and f'. The in-band analogue
/// uses the in-band energies.
inline double tail_sample_bound(double f_out_energy, double fprime_out_energy) {
    if (f_out_energy < 0.0 || fprime_out_energy < 0.0)
        throw validation_error("tail_sample_bound: energies must be non-negative");
    return f_out_energy + 2.0 * std::sqrt(f_out_energy * fprime_out_energy);
}

/// Sampling factor C_n = 1 + 2 sqrt(C_extra,n) in the squared-prefactor
/// convention, i.e. 1 + 2 c_extra with the square-root form stored here.
inline double sampling_c_factor(const PswfBasis& b, int n) {
    const double T = b.T();
    const double lam = b.lambda[n];
    const double d_inf = detail::deriv_energy_total(b, n);
    const double xi_T = b.scale[n] * detail::legendre_series(b.coeffs[n], 1.0);
    const double ce2 = d_inf - (lam / T) * xi_T * xi_T / b.one_minus_gamma[n];
    return 1.0 + 2.0 * std::sqrt(std::max(0.0, ce2));
}

/// Full truncation bound on ||f - f_{N,c}||^2_T:
///   (pi/W) (E + 2 sqrt(E E')) sum_{n<N} gamma_n (1-gamma_n) C_n
///   + sum_{n>=N} gamma_n |a_n|^2,
/// with E, E' the exterior energies of f and f', and the second argument the
/// prolate-coefficient tail energy.
inline double truncation_error_bound(const PswfBasis& b, double f_out_energy,
                                     double fprime_out_energy, double tail_coeff_energy, int N) {
    if (N > b.count) throw dimension_error("truncation_error_bound: N exceeds basis count");
    double s = 0.0;
    for (int n = 0; n < N; ++n)
        s += b.gamma[n] * b.one_minus_gamma[n] * sampling_c_factor(b, n);
    return pi / b.W() * tail_sample_bound(f_out_energy, fprime_out_energy) * s + tail_coeff_energy;
}

/// Specialized bound for f spanned by the first N+1 prolates:
///   ||f - f_{N+1,c}||^2_T <= (pi ||f||^2 / W) (1-gamma_N) C_N
///                            sum_{n<=N} gamma_n (1-gamma_n) C_n.
inline double span_truncation_bound(const PswfBasis& b, int N, double f_norm_sq) {
    if (N >= b.count) throw dimension_error("span_truncation_bound: N exceeds basis count");
    double s = 0.0;
    for (int n = 0; n <= N; ++n)
        s += b.gamma[n] * b.one_minus_gamma[n] * sampling_c_factor(b, n);
    return pi / b.W() * f_norm_sq * b.one_minus_gamma[N] * sampling_c_factor(b, N) * s;
}

} // namespace prolate

#endif
