#ifndef PROLATE_PSWF_HPP
#define PROLATE_PSWF_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "prolate/errors.hpp"
#include "prolate/legendre.hpp"
#include "prolate/quadrature.hpp"

namespace prolate {

using std::numbers::pi;

/// Band/time geometry of a concentration problem: half time-window T,
/// half bandwidth W, band-time product c = W*T and the essential
/// dimension 2WT/pi.
struct BandTimeSpec {
    double T = 1.0;
    double W = 1.0;
    double c = 1.0;       // W * T, stored
    double c_tilde = 0.0; // 2 c / pi

    BandTimeSpec() = default;
    BandTimeSpec(double T_, double W_) : T(T_), W(W_), c(W_ * T_), c_tilde(2.0 * W_ * T_ / pi) {
        if (!(T > 0.0) || !(W > 0.0))
            throw validation_error("BandTimeSpec: T and W must be positive");
    }

    static BandTimeSpec from_c_T(double c_, double T_) { return {T_, c_ / T_}; }
    static BandTimeSpec from_c_W(double c_, double W_) { return {c_ / W_, W_}; }
};

/// A family of prolate spheroidal wave functions for one BandTimeSpec.
///
/// Stored representation: S_n on [-1,1] as coefficients in orthonormal
/// Legendre polynomials with unit l2 norm, so that
///   xi_n(t) = scale[n] * S_n(t / T),   scale[n] = sqrt(gamma[n] / T)
/// is the prolate normalized to unit norm over the whole real line
/// (its energy inside [-T,T] is then gamma[n]).
struct PswfBasis {
    BandTimeSpec spec;
    int count = 0;

    std::vector<Eigen::VectorXd> coeffs; // per n, orthonormal-Legendre coefficients of S_n
    Eigen::VectorXd chi;                 // eigenvalues of the prolate differential operator
    Eigen::VectorXd lambda;              // chi - c^2
    Eigen::VectorXd gamma;               // concentration eigenvalues, in (0,1)
    Eigen::VectorXd one_minus_gamma;     // stored separately (cancellation-safe)
    Eigen::VectorXcd mu;                 // eigenvalues of the exponential kernel
    Eigen::VectorXd scale;               // sqrt(gamma/T): coefficients -> unit-R-norm prolate

    // cached quadrature on [-1,1] and prolate values at its nodes
    Eigen::VectorXd zq, zw;   // nodes/weights on [-1,1]
    Eigen::MatrixXd S_q;      // S_n(zq_i), column n
    Eigen::MatrixXd dS_q;     // S_n'(zq_i)
    Eigen::VectorXd max_abs_S;

    [[nodiscard]] double T() const { return spec.T; }
    [[nodiscard]] double W() const { return spec.W; }
    [[nodiscard]] double c() const { return spec.c; }

    void require_index(int n, const char* who) const {
        if (n < 0 || n >= count)
            throw dimension_error(std::string(who) + ": prolate index " + std::to_string(n) +
                                  " out of range (count = " + std::to_string(count) + ")");
    }
};

namespace detail {

/// Tridiagonal matrix elements of the prolate differential operator in the
/// orthonormal Legendre basis (operator -[(1-z^2) y']' + c^2 z^2 y, whose
/// eigenvalues are chi_n).
inline void pswe_matrix_elements(double c, int K, Eigen::VectorXd& diag, Eigen::VectorXd& off2) {
    diag.resize(K);
    off2.resize(std::max(0, K - 2));
    const double c2 = c * c;
    for (int k = 0; k < K; ++k) {
        const double kk = k;
        diag[k] = kk * (kk + 1) + c2 * (2 * kk * (kk + 1) - 1) / ((2 * kk - 1) * (2 * kk + 3));
        if (k + 2 < K)
            off2[k] = c2 * (kk + 2) * (kk + 1) /
                      ((2 * kk + 3) * std::sqrt((2 * kk + 1) * (2 * kk + 5)));
    }
}

/// Exterior Fourier moments of a prolate over [-T, T]:
///   C_j = int t^j cos(W t) xi(t) dt,  S_j = int t^j sin(W t) xi(t) dt,
/// j = 0..2. They drive the 1/t expansion of xi outside the window.
struct ExteriorMoments {
    double C[3], S[3];
};

inline ExteriorMoments exterior_moments(const PswfBasis& b, int n) {
    ExteriorMoments m{};
    const double T = b.T(), W = b.W();
    for (int j = 0; j < 3; ++j) {
        double cj = 0, sj = 0;
        for (Eigen::Index i = 0; i < b.zq.size(); ++i) {
            const double t = T * b.zq[i];
            const double w = T * b.zw[i];
            const double xi = b.scale[n] * b.S_q(i, n);
            const double tj = std::pow(t, j);
            cj += w * tj * std::cos(W * t) * xi;
            sj += w * tj * std::sin(W * t) * xi;
        }
        m.C[j] = cj;
        m.S[j] = sj;
    }
    return m;
}

/// int_X^inf xi^2 dt from the 1/t expansion
///   pi gamma xi(t) = P0/t + P1/t^2 + P2/t^3 + ...,  Pj = sin(Wt) C_j - cos(Wt) S_j.
/// Keeps terms through 1/X^3 plus the leading oscillatory boundary term.
inline double exterior_energy_tail(const PswfBasis& b, int n, const ExteriorMoments& m, double X) {
    const double W = b.W(), g = b.gamma[n];
    const double C0 = m.C[0], S0 = m.S[0], C1 = m.C[1], S1 = m.S[1], C2 = m.C[2], S2 = m.S[2];
    const double a0 = C0 * C0 + S0 * S0;
    double tail = a0 / (2.0 * X) + (C0 * C1 + S0 * S1) / (2.0 * X * X) +
                  (0.5 * (C1 * C1 + S1 * S1) + C0 * C2 + S0 * S2) / (3.0 * X * X * X);
    // leading oscillatory boundary term of int P0^2/t^2
    tail += (0.5 * (C0 * C0 - S0 * S0) * std::sin(2 * W * X) - C0 * S0 * std::cos(2 * W * X)) /
            (2.0 * W * X * X);
    return tail / (pi * pi * g * g);
}

/// int_X^inf xi_n xi_m dt for a same-parity pair by the product of the two
/// 1/t expansions, through 1/X^3 plus the leading oscillatory boundary term.
inline double exterior_pair_tail(const PswfBasis& b, int n, int m, const ExteriorMoments& a,
                                 const ExteriorMoments& bm, double X) {
    const double W = b.W();
    const double g = b.gamma[n] * b.gamma[m];
    auto cc = [&](int i, int j) { return a.C[i] * bm.C[j] + a.S[i] * bm.S[j]; };
    double tail = cc(0, 0) / (2.0 * X) + 0.5 * (cc(0, 1) + cc(1, 0)) / (2.0 * X * X) +
                  (0.5 * cc(1, 1) + 0.5 * (cc(0, 2) + cc(2, 0))) / (3.0 * X * X * X);
    const double cos_part = a.C[0] * bm.C[0] - a.S[0] * bm.S[0];
    const double sin_part = a.C[0] * bm.S[0] + a.S[0] * bm.C[0];
    tail += (0.5 * cos_part * std::sin(2 * W * X) - 0.5 * sin_part * std::cos(2 * W * X)) /
            (2.0 * W * X * X);
    return tail / (pi * pi * g);
}

/// int_X^inf xi'^2 dt by the same expansion: pi gamma xi'(t) = W Q0/t + (W Q1 - P0)/t^2 + ...
/// with Qj = cos(Wt) C_j + sin(Wt) S_j; the Q0*P0 cross average vanishes.
inline double exterior_deriv_energy_tail(const PswfBasis& b, int n, const ExteriorMoments& m,
                                         double X) {
    const double W = b.W(), g = b.gamma[n];
    const double C0 = m.C[0], S0 = m.S[0], C1 = m.C[1], S1 = m.S[1];
    const double C2 = m.C[2], S2 = m.S[2];
    const double a0 = C0 * C0 + S0 * S0;
    double tail = W * W * (a0 / (2.0 * X) + (C0 * C1 + S0 * S1) / (2.0 * X * X));
    // third order: averages of (W Q1 - P0)^2 + 2 W Q0 (W Q2 - 2 P1)
    tail += (W * W * (0.5 * (C1 * C1 + S1 * S1) + C0 * C2 + S0 * S2) + 0.5 * a0 +
             W * (C0 * S1 - S0 * C1)) /
            (3.0 * X * X * X);
    // leading oscillatory boundary term of int (W Q0)^2/t^2
    tail += W * W *
            (-0.5 * (C0 * C0 - S0 * S0) * std::sin(2 * W * X) + C0 * S0 * std::cos(2 * W * X)) /
            (2.0 * W * X * X);
    return tail / (pi * pi * g * g);
}

} // namespace detail

/// Prolate value xi_n(t), valid for all real t. Inside [-T,T] the stored
/// expansion is used; outside, the integral extension
///   xi_n(t) = gamma_n^{-1} int_{-T}^{T} rho_W(t - s) xi_n(s) ds.
inline double eval_xi(const PswfBasis& b, int n, double t) {
    b.require_index(n, "eval_xi");
    const double T = b.T(), W = b.W();
    if (std::abs(t) <= T) return b.scale[n] * detail::legendre_series(b.coeffs[n], t / T);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b.zq.size(); ++i) {
        const double s = T * b.zq[i];
        acc += T * b.zw[i] * detail::sinc_kernel(W, t - s) * b.scale[n] * b.S_q(i, n);
    }
    return acc / b.gamma[n];
}

/// Derivative xi_n'(t). Inside: term-wise series derivative; outside:
/// derivative of the integral extension. At |t| = T both agree through the
/// differential-equation relation xi'(T) = (lambda/2T) xi(T).
inline double eval_xi_deriv(const PswfBasis& b, int n, double t) {
    b.require_index(n, "eval_xi_deriv");
    const double T = b.T(), W = b.W();
    if (std::abs(t) <= T)
        return b.scale[n] * detail::legendre_series_deriv(b.coeffs[n], t / T) / T;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < b.zq.size(); ++i) {
        const double s = T * b.zq[i];
        acc += T * b.zw[i] * detail::sinc_kernel_deriv(W, t - s) * b.scale[n] * b.S_q(i, n);
    }
    return acc / b.gamma[n];
}

namespace detail {

/// Prolate value through the Fourier-side eigenrelation,
///   xi_n(t) = (sqrt(gamma_n W) / mu_n) int_{-1}^{1} S_n(z) e^{i W t z} dz,
/// an evaluation route independent of the integral extension. Used by
/// consistency checks and test oracles.
inline double eval_xi_fourier(const PswfBasis& b, int n, double t) {
    const double W = b.W();
    std::complex<double> acc{0.0, 0.0};
    for (Eigen::Index i = 0; i < b.zq.size(); ++i) {
        const double z = b.zq[i];
        acc += b.zw[i] * b.S_q(i, n) * std::complex<double>(std::cos(W * t * z), std::sin(W * t * z));
    }
    const std::complex<double> val = std::sqrt(b.gamma[n] * W) / b.mu[n] * acc;
    return val.real();
}

/// Exterior energy 2 int_T^X xi^2 + analytic tail, used for the
/// cancellation-safe 1 - gamma path and for derivative energy splits.
struct ExteriorEnergies {
    double energy;       // int_{|t|>T} xi^2
    double deriv_energy; // int_{|t|>T} xi'^2
};

inline ExteriorEnergies exterior_energies(const PswfBasis& b, int n, double X_over_T = 600.0) {
    const double T = b.T(), W = b.W();
    const double X = X_over_T * T;
    const QuadRule rule = panelized_gauss_legendre(T, X, pi / W, 16);
    double e = 0.0, de = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
        const double t = rule.nodes[i];
        const double v = eval_xi(b, n, t);
        const double dv = eval_xi_deriv(b, n, t);
        e += rule.weights[i] * v * v;
        de += rule.weights[i] * dv * dv;
    }
    const ExteriorMoments m = exterior_moments(b, n);
    e += exterior_energy_tail(b, n, m, X);
    de += exterior_deriv_energy_tail(b, n, m, X);
    return {2.0 * e, 2.0 * de}; // xi^2 is even
}

/// int_{|t|>T} xi_n xi_m dt; identically zero for opposite parities.
inline double exterior_pair_integral(const PswfBasis& b, int n, int m, double X_over_T = 150.0) {
    if ((n + m) % 2 == 1) return 0.0;
    const double T = b.T(), W = b.W();
    const double X = X_over_T * T;
    const QuadRule rule = panelized_gauss_legendre(T, X, pi / W, 16);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i)
        acc += rule.weights[i] * eval_xi(b, n, rule.nodes[i]) * eval_xi(b, m, rule.nodes[i]);
    acc += exterior_pair_tail(b, n, m, exterior_moments(b, n), exterior_moments(b, m), X);
    return 2.0 * acc;
}

} // namespace detail

/// Build the first N prolates of a BandTimeSpec.
///
/// The generalized prolate differential operator induces a symmetric
/// tridiagonal eigenproblem (split by parity) on the Legendre coefficients
/// of S_n; chi_n are its eigenvalues. gamma_n and mu_n come from the
/// exponential-kernel eigenrelation evaluated as a ratio at a probe point,
/// which avoids the ill-conditioned radial-function route.
inline PswfBasis build_basis(const BandTimeSpec& spec, int N, int quad_order = 200) {
    if (N < 1) throw validation_error("build_basis: N must be >= 1");
    if (quad_order < 16) throw validation_error("build_basis: quad_order must be >= 16");
    const double c = spec.c;

    PswfBasis b;
    b.spec = spec;
    b.count = N;

    // coefficient count: grow until the tail of the last prolate is below
    // machine-epsilon scale (super-exponential decay makes this cheap)
    int K = std::max(2 * N + 30, N + static_cast<int>(2.0 * c) + 30);
    Eigen::MatrixXd coef;
    Eigen::VectorXd chis;
    for (int attempt = 0;; ++attempt) {
        Eigen::VectorXd diag, off2;
        detail::pswe_matrix_elements(c, K, diag, off2);
        coef.setZero(K, N);
        chis.resize(N);
        for (int par = 0; par < 2; ++par) {
            const int Kp = (K - par + 1) / 2;
            Eigen::VectorXd d(Kp), o(Kp - 1);
            for (int k = 0; k < Kp; ++k) d[k] = diag[2 * k + par];
            for (int k = 0; k + 1 < Kp; ++k) o[k] = off2[2 * k + par];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            es.computeFromTridiagonal(d, o, Eigen::ComputeEigenvectors);
            for (int n = par; n < N; n += 2) {
                const int j = n / 2;
                if (j >= Kp) throw dimension_error("build_basis: coefficient space too small");
                chis[n] = es.eigenvalues()[j];
                for (int k = 0; k < Kp; ++k) coef(2 * k + par, n) = es.eigenvectors()(k, j);
            }
        }
        // tail check on the highest prolate
        double mx = coef.col(N - 1).cwiseAbs().maxCoeff();
        const double tail = std::max(std::abs(coef(K - 1, N - 1)), std::abs(coef(K - 2, N - 1)));
        if (tail < 1e-16 * mx) break;
        if (attempt >= 4 || K > 6000)
            throw dimension_error("build_basis: Legendre coefficient tail of prolate " +
                                  std::to_string(N - 1) + " did not converge (K = " +
                                  std::to_string(K) + ")");
        K *= 2;
    }

    b.chi = chis;
    b.lambda = chis.array() - c * c;
    for (int n = 1; n < N; ++n)
        if (!(b.lambda[n] > b.lambda[n - 1]))
            throw consistency_error("build_basis: lambda ordering violated at n = " +
                                    std::to_string(n));

    // sign convention: first reliably nonzero Legendre coefficient positive
    b.coeffs.resize(N);
    for (int n = 0; n < N; ++n) {
        Eigen::VectorXd v = coef.col(n);
        const double mx = v.cwiseAbs().maxCoeff();
        for (int k = 0; k < K; ++k) {
            if (std::abs(v[k]) > 1e-12 * mx) {
                if (v[k] < 0) v = -v;
                break;
            }
        }
        b.coeffs[n] = v;
    }

    // cached quadrature on [-1,1]: two panels per the default policy
    const QuadRule rule = composite_gauss_legendre(-1.0, 1.0, 2, quad_order);
    b.zq = rule.nodes;
    b.zw = rule.weights;
    b.S_q.resize(rule.size(), N);
    b.dS_q.resize(rule.size(), N);
    b.max_abs_S.resize(N);
    for (int n = 0; n < N; ++n) {
        for (Eigen::Index i = 0; i < rule.size(); ++i) {
            b.S_q(i, n) = detail::legendre_series(b.coeffs[n], b.zq[i]);
            b.dS_q(i, n) = detail::legendre_series_deriv(b.coeffs[n], b.zq[i]);
        }
        b.max_abs_S[n] = b.S_q.col(n).cwiseAbs().maxCoeff();
    }

    // gamma_n and mu_n by the exponential-eigenrelation ratio at the probe
    // maximizing |S_n|
    b.gamma.resize(N);
    b.one_minus_gamma.resize(N);
    b.mu.resize(N);
    b.scale.resize(N);
    for (int n = 0; n < N; ++n) {
        Eigen::Index imax = 0;
        b.S_q.col(n).cwiseAbs().maxCoeff(&imax);
        const double tau = b.zq[imax];
        std::complex<double> I{0.0, 0.0};
        for (Eigen::Index i = 0; i < rule.size(); ++i) {
            const double ph = c * tau * b.zq[i];
            I += b.zw[i] * b.S_q(i, n) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
        const std::complex<double> mu_raw = std::sqrt(c) * I / b.S_q(imax, n);
        double g = std::norm(mu_raw) / (2.0 * pi);
        if (!(g > 0.0) || !(g < 1.0 + 1e-12))
            throw consistency_error("build_basis: gamma out of (0,1) at n = " + std::to_string(n));
        g = std::min(g, 1.0);
        // snap mu to the convention mu_n = i^n sqrt(2 pi gamma_n), flipping
        // sign if the raw value sits closer to the opposite phase
        std::complex<double> target = std::pow(std::complex<double>(0.0, 1.0), n) *
                                      std::sqrt(2.0 * pi * g);
        if (std::abs(mu_raw - target) > std::abs(mu_raw + target)) target = -target;
        b.mu[n] = target;
        b.gamma[n] = g;
        b.scale[n] = std::sqrt(g / spec.T);
    }

    // strict ordering is enforced down to the quadrature noise floor of the
    // ratio method; far below the transition the computed gammas are
    // noise-limited around 1e-30
    for (int n = 1; n < N; ++n)
        if (b.gamma[n - 1] > 1e-26 && !(b.gamma[n] < b.gamma[n - 1]))
            throw consistency_error("build_basis: gamma ordering violated at n = " +
                                    std::to_string(n));

    // 1 - gamma: direct subtraction keeps >= 11 digits down to 1e-4; below
    // that, integrate the exterior energy and re-derive gamma from it so the
    // pair sums to one exactly
    for (int n = 0; n < N; ++n) {
        const double direct = 1.0 - b.gamma[n];
        if (direct >= 1e-4) {
            b.one_minus_gamma[n] = direct;
        } else {
            const double ext = detail::exterior_energies(b, n).energy;
            b.one_minus_gamma[n] = ext;
            b.gamma[n] = 1.0 - ext;
            b.scale[n] = std::sqrt(b.gamma[n] / spec.T);
            const std::complex<double> in = std::pow(std::complex<double>(0.0, 1.0), n);
            const double sgn = ((b.mu[n] / in).real() < 0.0) ? -1.0 : 1.0;
            b.mu[n] = sgn * in * std::sqrt(2.0 * pi * b.gamma[n]);
        }
    }
    return b;
}

/// The concentration eigenvalue and its complement, both positive, summing
/// to one to working precision.
struct GammaPair {
    double gamma;
    double one_minus_gamma;
};

inline GammaPair gamma_pair(const PswfBasis& b, int n) {
    b.require_index(n, "gamma_pair");
    return {b.gamma[n], b.one_minus_gamma[n]};
}

/// Two-term large-c asymptotic of 1 - gamma_n:
///   (4 sqrt(pi) 2^{3n} c^{n+1/2} e^{-2c} / n!) [1 - (6n^2 - 2n + 3)/(32 c)].
inline double fuchs_asymptotic(double c, int n) {
    if (!(c > 0.0)) throw validation_error("fuchs_asymptotic: c must be positive");
    const double lead = 4.0 * std::sqrt(pi) * std::pow(8.0, n) * std::pow(c, n + 0.5) *
                        std::exp(-2.0 * c) / std::tgamma(n + 1.0);
    return lead * (1.0 - (6.0 * n * n - 2.0 * n + 3.0) / (32.0 * c));
}

/// Max residual of the sinc-kernel eigenrelation over probe points,
/// relative to gamma_n * max |xi_n|. Probes inside [-T,T] compare against
/// the stored expansion, probes outside against the Fourier-side route.
inline double residual_integral_eigenrelation(const PswfBasis& b, int n,
                                              const std::vector<double>& probes) {
    b.require_index(n, "residual_integral_eigenrelation");
    const double T = b.T(), W = b.W();
    const double ref_scale = b.gamma[n] * b.scale[n] * b.max_abs_S[n];
    double worst = 0.0;
    for (double s : probes) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < b.zq.size(); ++i) {
            const double t = T * b.zq[i];
            acc += T * b.zw[i] * detail::sinc_kernel(W, s - t) * b.scale[n] * b.S_q(i, n);
        }
        const double xi_ref = (std::abs(s) <= T)
                                  ? b.scale[n] * detail::legendre_series(b.coeffs[n], s / T)
                                  : detail::eval_xi_fourier(b, n, s);
        worst = std::max(worst, std::abs(acc - b.gamma[n] * xi_ref) / ref_scale);
    }
    return worst;
}

/// Status of the conjectured transition signature lambda_{[c~]-1} <= 0 <=
/// lambda_{[c~]+1}. A conjecture check: reported, never asserted.
struct TransitionSignature {
    int index = 0;              // [c~]
    double lambda_below = 0.0;  // lambda_{[c~]-1}
    double lambda_above = 0.0;  // lambda_{[c~]+1}
    bool holds = false;
    bool degenerate = false;    // c~ < 1: no index below the transition
};

inline TransitionSignature transition_signature(const PswfBasis& b) {
    TransitionSignature out;
    out.index = static_cast<int>(std::floor(b.spec.c_tilde));
    if (b.count <= out.index + 1)
        throw dimension_error("transition_signature: basis needs count > floor(c_tilde) + 1");
    if (out.index == 0) {
        out.degenerate = true;
        out.lambda_below = b.lambda[0];
        out.lambda_above = b.lambda[1];
        out.holds = b.lambda[0] <= 0.0 && 0.0 <= b.lambda[1];
        return out;
    }
    out.lambda_below = b.lambda[out.index - 1];
    out.lambda_above = b.lambda[out.index + 1];
    out.holds = out.lambda_below <= 0.0 && 0.0 <= out.lambda_above;
    return out;
}

} // namespace prolate

#endif
