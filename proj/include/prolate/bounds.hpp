#ifndef PROLATE_BOUNDS_HPP
#define PROLATE_BOUNDS_HPP

#include <cmath>

#include "prolate/pswf.hpp"

namespace prolate {

/// Prefactors and numerically measured suprema for one prolate.
///
/// Conventions: c_extra and c_intra are the square-root forms
///   c_extra = sqrt(||xi'||^2_inf - (lambda/T) xi(T)^2 / (1-gamma)),
///   c_intra = sqrt(||xi'||^2_inf + (lambda/T) xi(T)^2 / gamma),
/// so that the derivative-energy identities read
///   ||xi'||^2_T = gamma * c_intra^2,  ||xi'||^2_{>T} = (1-gamma) * c_extra^2
/// and the supremum bounds read
///   sup_{|t|>=T} xi^2 <= (1-gamma) c_extra,
///   sup_{|t|<=T} xi^2 <= gamma * c_intra_tilde,
/// with c_intra_tilde = c_intra + (n==0) xi(T)^2 / gamma.
struct BoundReport {
    int n = 0;
    double c_extra = 0.0;
    double c_intra = 0.0;
    double c_n = 0.0;           // sqrt(||xi'||^2_inf + lambda^2 / 4T^2)
    double c_intra_tilde = 0.0;
    double xi_T_sq = 0.0;       // xi(T)^2
    double deriv_inf_sq = 0.0;  // ||xi'||^2 over R
    double deriv_T_sq = 0.0;    // quadrature over [-T,T]
    double deriv_out_sq = 0.0;  // quadrature over |t|>T plus analytic tail
    double sup_out_numeric = 0.0;
    double sup_in_numeric = 0.0;
};

namespace detail {

/// ||xi'||^2 over R from the Fourier-side identity
///   ||xi'||^2 = (W^2 / (gamma T^2)) int_{-T}^{T} t^2 xi(t)^2 dt.
inline double deriv_energy_total(const PswfBasis& b, int n) {
    const double T = b.T(), W = b.W();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b.zq.size(); ++i) {
        const double t = T * b.zq[i];
        const double xi = b.scale[n] * b.S_q(i, n);
        acc += T * b.zw[i] * t * t * xi * xi;
    }
    return W * W / (b.gamma[n] * T * T) * acc;
}

/// int_{-T}^{T} xi'^2 from the cached series derivative.
inline double deriv_energy_window(const PswfBasis& b, int n) {
    const double T = b.T();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b.zq.size(); ++i) {
        const double dxi = b.scale[n] * b.dS_q(i, n) / T;
        acc += T * b.zw[i] * dxi * dxi;
    }
    return acc;
}

/// Grid supremum of f^2 with step `step` on [a, b], refined by golden section
/// around the best grid cell.
template <typename F>
double grid_sup_squared(F&& f, double a, double b, double step) {
    const int npts = std::max(2, static_cast<int>(std::ceil((b - a) / step)) + 1);
    const double h = (b - a) / (npts - 1);
    double best = -1.0;
    int ibest = 0;
    for (int i = 0; i < npts; ++i) {
        const double v = f(a + i * h);
        if (v * v > best) {
            best = v * v;
            ibest = i;
        }
    }
    double lo = a + std::max(0, ibest - 1) * h;
    double hi = a + std::min(npts - 1, ibest + 1) * h;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = -std::pow(f(x1), 2), f2 = -std::pow(f(x2), 2);
    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = -std::pow(f(x1), 2);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = -std::pow(f(x2), 2);
        }
    }
    return std::max(best, std::max(-f1, -f2));
}

} // namespace detail

/// Compute the full bound report for prolate n. The exterior supremum is
/// searched on [T, T + 40/W] with grid step pi/(8W); the exterior function
/// decays, so the window suffices.
inline BoundReport bound_report(const PswfBasis& b, int n) {
    b.require_index(n, "bound_report");
    const double T = b.T(), W = b.W();
    const double g = b.gamma[n], omg = b.one_minus_gamma[n], lam = b.lambda[n];
    if (!(omg > 0.0))
        throw consistency_error("bound_report: 1 - gamma underflows at n = " + std::to_string(n) +
                                "; use the asymptotic forms instead");

    BoundReport r;
    r.n = n;
    const double xi_T = b.scale[n] * detail::legendre_series(b.coeffs[n], 1.0);
    r.xi_T_sq = xi_T * xi_T;
    r.deriv_inf_sq = detail::deriv_energy_total(b, n);
    r.deriv_T_sq = detail::deriv_energy_window(b, n);
    r.deriv_out_sq = detail::exterior_energies(b, n).deriv_energy;

    const double ce2 = r.deriv_inf_sq - (lam / T) * r.xi_T_sq / omg;
    const double ci2 = r.deriv_inf_sq + (lam / T) * r.xi_T_sq / g;
    r.c_extra = std::sqrt(std::max(0.0, ce2));
    r.c_intra = std::sqrt(std::max(0.0, ci2));
    r.c_n = std::sqrt(r.deriv_inf_sq + lam * lam / (4.0 * T * T));
    r.c_intra_tilde = r.c_intra + (n == 0 ? r.xi_T_sq / g : 0.0);

    const double step = pi / (8.0 * W);
    r.sup_out_numeric =
        detail::grid_sup_squared([&](double t) { return eval_xi(b, n, t); }, T, T + 40.0 / W, step);
    r.sup_in_numeric =
        detail::grid_sup_squared([&](double t) { return eval_xi(b, n, t); }, -T, T, step);
    return r;
}

/// Right-hand sides of the edge bounds
///   xi_n(T)^2 <= (1-gamma_n)(C_n - lambda_n/2T)        (always)
///   xi_n(T)^2 <= gamma_n (C_n + lambda_n/2T)           (n > 0 only)
struct EdgeBounds {
    double extra_bound = 0.0;
    double intra_bound = 0.0;
    bool intra_applicable = true; // false for n = 0
};

inline EdgeBounds edge_bounds(const PswfBasis& b, int n) {
    b.require_index(n, "edge_bounds");
    const double T = b.T();
    const double lam = b.lambda[n];
    const double cn = std::sqrt(detail::deriv_energy_total(b, n) + lam * lam / (4.0 * T * T));
    EdgeBounds e;
    e.extra_bound = b.one_minus_gamma[n] * (cn - lam / (2.0 * T));
    e.intra_bound = b.gamma[n] * (cn + lam / (2.0 * T));
    e.intra_applicable = (n > 0);
    return e;
}

/// Two-term large-c asymptotic of the exterior supremum bound
///   (1-gamma_n) C_extra,n ~ W (4 sqrt(pi) 2^{3n} c^{n+3/2} e^{-2c} / n!)
///                           [1 - (6n^2 + 62n + 35)/(32c)].
/// Valid in the lambda_n < 0 regime for c >> 1; below c = 5 the correction
/// term is no longer small.
inline double asymptotic_sup_extra(const BandTimeSpec& spec, int n) {
    const double c = spec.c;
    const double lead = spec.W * 4.0 * std::sqrt(pi) * std::pow(8.0, n) * std::pow(c, n + 1.5) *
                        std::exp(-2.0 * c) / std::tgamma(n + 1.0);
    return lead * (1.0 - (6.0 * n * n + 62.0 * n + 35.0) / (32.0 * c));
}

/// Coarse n-independent bound on C_extra: W (sqrt(1 + c^2/4) + c/2), with its
/// regime expansion W (c + 1/c) for c >= 1 and W (1 + c) for c < 1.
struct CoarseCExtra {
    double exact;
    double expansion;
};

inline CoarseCExtra c_extra_coarse(double c, double W) {
    if (!(c > 0.0) && c != 0.0) throw validation_error("c_extra_coarse: c must be >= 0");
    CoarseCExtra out;
    out.exact = W * (std::sqrt(1.0 + c * c / 4.0) + c / 2.0);
    out.expansion = (c >= 1.0) ? W * (c + 1.0 / c) : W * (1.0 + c);
    return out;
}

} // namespace prolate

#endif
