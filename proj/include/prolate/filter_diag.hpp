#ifndef PROLATE_FILTER_DIAG_HPP
#define PROLATE_FILTER_DIAG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <future>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "prolate/bounds.hpp"
#include "prolate/pswf.hpp"
#include "prolate/spectral.hpp"

namespace prolate {

/// The guess space is provably at least M-dimensional: every Gram eigenvalue
/// clears the noise certificate, so the guess count must be increased.
class increase_m_error : public error {
public:
    explicit increase_m_error(const std::string& msg) : error(msg) {}
};

/// Ground-truth frequency model C(t) = sum_k |a_k|^2 e^{i omega_k t}.
struct DiscreteSignal {
    std::vector<double> omegas;
    std::vector<double> amps; // |a_k|^2 >= 0

    DiscreteSignal() = default;
    DiscreteSignal(std::vector<double> w, std::vector<double> a)
        : omegas(std::move(w)), amps(std::move(a)) {
        if (omegas.size() != amps.size())
            throw validation_error("DiscreteSignal: length mismatch");
        for (double v : amps)
            if (v < 0.0) throw validation_error("DiscreteSignal: negative amplitude");
        for (std::size_t i = 0; i < omegas.size(); ++i)
            for (std::size_t j = i + 1; j < omegas.size(); ++j)
                if (omegas[i] == omegas[j])
                    throw validation_error("DiscreteSignal: frequencies must be distinct");
    }

    [[nodiscard]] double c0() const {
        double s = 0.0;
        for (double v : amps) s += v;
        return s;
    }
    [[nodiscard]] std::complex<double> eval(double t) const {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = 0; k < omegas.size(); ++k)
            acc += amps[k] * std::complex<double>(std::cos(omegas[k] * t), std::sin(omegas[k] * t));
        return acc;
    }
};

/// Measured complex time series on a sorted grid covering [-2T, 2T]
/// (double integrals need C(tau - t) for tau, t in [-T, T]).
struct SampledSignal {
    Eigen::VectorXd times;
    Eigen::VectorXcd values;
    bool derivative_available = false;

    [[nodiscard]] bool covers(double a, double b) const {
        return times.size() > 0 && times[0] <= a && times[times.size() - 1] >= b;
    }

    /// Local barycentric Lagrange interpolation with a 16-point sliding
    /// window. The signals handled here are entire, so a moderate window
    /// gives near-spectral accuracy on reasonably dense grids.
    [[nodiscard]] std::complex<double> interp(double t) const {
        const Eigen::Index n = times.size();
        if (n < 2) throw validation_error("SampledSignal: too few samples");
        const int p = static_cast<int>(std::min<Eigen::Index>(16, n));
        // binary search for the bracketing index
        Eigen::Index lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const Eigen::Index mid = (lo + hi) / 2;
            (times[mid] <= t ? lo : hi) = mid;
        }
        Eigen::Index start = std::clamp<Eigen::Index>(lo - p / 2 + 1, 0, n - p);
        // exact hit
        for (Eigen::Index i = start; i < start + p; ++i)
            if (times[i] == t) return values[i];
        double w[16];
        for (int i = 0; i < p; ++i) {
            double prod = 1.0;
            for (int j = 0; j < p; ++j)
                if (j != i) prod *= (times[start + i] - times[start + j]);
            w[i] = 1.0 / prod;
        }
        std::complex<double> num{0.0, 0.0};
        double den = 0.0;
        for (int i = 0; i < p; ++i) {
            const double q = w[i] / (t - times[start + i]);
            num += q * values[start + i];
            den += q;
        }
        return num / den;
    }

    /// Measured C(0): the sample at t = 0 if present, otherwise interpolated
    /// (flagged through the second member).
    [[nodiscard]] std::pair<std::complex<double>, bool> c_at_zero() const {
        for (Eigen::Index i = 0; i < times.size(); ++i)
            if (times[i] == 0.0) return {values[i], false};
        return {interp(0.0), true};
    }
};

/// Sample an exact model on a uniform grid over [-2T, 2T].
inline SampledSignal sample_signal(const DiscreteSignal& model, double T, double dt) {
    if (!(dt > 0.0)) throw validation_error("sample_signal: dt must be positive");
    const int n = static_cast<int>(std::ceil(4.0 * T / dt)) + 1;
    SampledSignal s;
    s.times.resize(n);
    s.values.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = -2.0 * T + i * dt;
        s.times[i] = t;
        s.values[i] = model.eval(t);
    }
    return s;
}

/// Prolate filter system centered at omega_center: time side D_T xi_l,
/// frequency side conj(mu_l) xi~_l with the dual prolate
/// xi~_l(w) = sqrt(T/W) xi_l(T w / W). ||f_l||^2 = gamma_l.
struct FilterSystem {
    std::shared_ptr<const PswfBasis> basis;
    int M = 0;
    double omega_center = 0.0;

    FilterSystem(std::shared_ptr<const PswfBasis> b, int M_, double center)
        : basis(std::move(b)), M(M_), omega_center(center) {
        if (!basis) throw validation_error("FilterSystem: null basis");
        if (M < 1 || M > basis->count)
            throw dimension_error("FilterSystem: M outside [1, basis count]");
    }

    [[nodiscard]] double T() const { return basis->T(); }
    [[nodiscard]] double W() const { return basis->W(); }

    /// F_l at a frequency relative to the band center.
    [[nodiscard]] std::complex<double> freq_profile(int l, double omega_rel) const {
        const double T_ = T(), W_ = W();
        return std::conj(basis->mu[l]) * std::sqrt(T_ / W_) *
               eval_xi(*basis, l, T_ * omega_rel / W_);
    }
    [[nodiscard]] std::complex<double> freq_profile_deriv(int l, double omega_rel) const {
        const double T_ = T(), W_ = W();
        return std::conj(basis->mu[l]) * std::sqrt(T_ / W_) * (T_ / W_) *
               eval_xi_deriv(*basis, l, T_ * omega_rel / W_);
    }

    /// Filter envelope sum_{l<M} |F_l(omega_rel)|^2 = 2 pi sum gamma_l xi~_l^2.
    [[nodiscard]] double envelope(double omega_rel) const {
        double s = 0.0;
        for (int l = 0; l < M; ++l) s += std::norm(freq_profile(l, omega_rel));
        return s;
    }

    /// Alternant matrix (F_l(omega_k - omega_center))_{kl} at absolute
    /// frequencies.
    [[nodiscard]] Eigen::MatrixXcd alternant(const std::vector<double>& omegas_abs) const {
        Eigen::MatrixXcd F(omegas_abs.size(), M);
        for (std::size_t k = 0; k < omegas_abs.size(); ++k)
            for (int l = 0; l < M; ++l)
                F(k, l) = freq_profile(l, omegas_abs[k] - omega_center);
        return F;
    }
    [[nodiscard]] Eigen::MatrixXcd alternant_deriv(const std::vector<double>& omegas_abs) const {
        Eigen::MatrixXcd F(omegas_abs.size(), M);
        for (std::size_t k = 0; k < omegas_abs.size(); ++k)
            for (int l = 0; l < M; ++l)
                F(k, l) = freq_profile_deriv(l, omegas_abs[k] - omega_center);
        return F;
    }
};

/// Out-of-band leakage certificate of the prolate filter system:
///   eps~_M = 2 pi sum_{l<M} gamma_l (1-gamma_l) C_extra,l,
/// an upper bound for sup_{|w|>W} of the filter envelope whenever T <= W,
/// together with its printed large-c asymptotic. The noise certificate for a
/// signal of total power C(0) is eps_M = C(0) * eps~_M.
struct EnvelopeBound {
    double epsilon_tilde = 0.0;
    double asymptotic = 0.0;

    [[nodiscard]] double epsilon_M(double c0) const { return c0 * epsilon_tilde; }
};

inline EnvelopeBound prolate_envelope_sup(const PswfBasis& b, int M) {
    if (M > b.count) throw dimension_error("prolate_envelope_sup: M exceeds basis count");
    EnvelopeBound out;
    const double T = b.T();
    for (int l = 0; l < M; ++l) {
        const double lam = b.lambda[l];
        const double d_inf = detail::deriv_energy_total(b, l);
        const double xi_T = b.scale[l] * detail::legendre_series(b.coeffs[l], 1.0);
        const double ce2 = d_inf - (lam / T) * xi_T * xi_T / b.one_minus_gamma[l];
        out.epsilon_tilde +=
            2.0 * pi * b.gamma[l] * b.one_minus_gamma[l] * std::sqrt(std::max(0.0, ce2));
    }
    if (M >= 1) {
        const double c = b.c();
        out.asymptotic = M * b.W() * std::pow(pi, 1.5) * std::pow(8.0, M) *
                         std::pow(c, M + 0.5) * std::exp(-2.0 * c) / std::tgamma(M) *
                         (1.0 - (6.0 * M * M + 50.0 * M - 21.0) / (32.0 * c));
    }
    return out;
}

/// Time-domain GEP assembly from signal samples over [-2T, 2T]:
///   V^2_sl = int int e^{-i w*(tau-t)} f_s(tau) f_l(t) C(tau-t) dt dtau,
/// and the left matrix through the partially integrated form
/// (w* f_l - i f_l') plus its boundary terms, which avoids differentiating
/// measured data. Matrices are hermitized by averaging; the hermiticity
/// residual before averaging is reported through `herm_residual`.
inline Gep assemble_gep_time(const std::function<std::complex<double>(double)>& C,
                             const FilterSystem& filters, int quad_order = -1,
                             double* herm_residual = nullptr) {
    const PswfBasis& b = *filters.basis;
    const double T = b.T(), ws = filters.omega_center;
    const int M = filters.M;
    if (quad_order < 0) quad_order = 2 * static_cast<int>(std::ceil(b.c())) + 60;

    // edge values of the filters for the boundary terms
    Eigen::VectorXd xi_edge(M);
    for (int l = 0; l < M; ++l)
        xi_edge[l] = b.scale[l] * detail::legendre_series(b.coeffs[l], 1.0);

    auto assemble_at = [&](int order) {
        const QuadRule rule = gauss_legendre(order).mapped_to(-T, T);
        const Eigen::Index Q = rule.size();
        Eigen::MatrixXd X(Q, M);        // weights * xi_l(tau)
        Eigen::MatrixXcd Z(Q, M);       // weights * (w* xi_l - i xi_l')
        Eigen::MatrixXcd Bc(Q, M);      // boundary terms, tau-weighted
        Eigen::MatrixXcd Cm(Q, Q);      // e^{-i w*(tau - t)} C(tau - t)
        const std::complex<double> i_unit{0.0, 1.0};
        const std::complex<double> eT{std::cos(ws * T), std::sin(ws * T)};
        for (Eigen::Index a = 0; a < Q; ++a) {
            const double tau = rule.nodes[a];
            for (int l = 0; l < M; ++l) {
                const double xi = b.scale[l] * detail::legendre_series(b.coeffs[l], tau / T);
                const double dxi =
                    b.scale[l] * detail::legendre_series_deriv(b.coeffs[l], tau / T) / T;
                X(a, l) = rule.weights[a] * xi;
                Z(a, l) = rule.weights[a] * (ws * xi - i_unit * dxi);
            }
            for (Eigen::Index bb = 0; bb < Q; ++bb) {
                const double d = tau - rule.nodes[bb];
                Cm(a, bb) = std::complex<double>(std::cos(ws * d), -std::sin(ws * d)) * C(d);
            }
            const std::complex<double> e_tau{std::cos(ws * tau), -std::sin(ws * tau)};
            const std::complex<double> cm = C(tau - T), cp = C(tau + T);
            for (int l = 0; l < M; ++l) {
                // the tau-side weight comes in through X
                const double xi_m = (l % 2 == 0) ? xi_edge[l] : -xi_edge[l]; // xi_l(-T)
                Bc(a, l) =
                    e_tau * i_unit * (eT * xi_edge[l] * cm - std::conj(eT) * xi_m * cp);
            }
        }
        Eigen::MatrixXcd V2 = X.transpose() * Cm * X;
        Eigen::MatrixXcd H = X.transpose() * (Cm * Z) + X.transpose() * Bc;
        return std::make_pair(V2, H);
    };

    auto [V2, H] = assemble_at(quad_order);
    for (int d = 0; d < 2; ++d) {
        auto [V2b, Hb] = assemble_at(quad_order * 2);
        const double dv = (V2b - V2).norm() / std::max(1e-300, V2b.norm());
        const double dh = (Hb - H).norm() / std::max(1e-300, Hb.norm());
        V2 = V2b;
        H = Hb;
        quad_order *= 2;
        if (dv < 1e-11 && dh < 1e-11) break;
    }

    const double res = std::max((V2 - V2.adjoint()).norm() / std::max(1e-300, V2.norm()),
                                (H - H.adjoint()).norm() / std::max(1e-300, H.norm()));
    if (herm_residual) *herm_residual = res;
    V2 = 0.5 * (V2 + V2.adjoint()).eval();
    H = 0.5 * (H + H.adjoint()).eval();

    // The exact Gram is positive semidefinite (the autocorrelation kernel is
    // positive definite); quadrature and interpolation leave negative dust on
    // the scale of |C| * (2T). Project that dust away; anything larger means
    // inconsistent data.
    const double floor = 1e-11 * std::abs(C(0.0)) * 2.0 * T + 1e-300;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(V2);
    if (es.eigenvalues().minCoeff() < -floor)
        throw consistency_error("assemble_gep_time: Gram matrix indefinite beyond the "
                                "quadrature noise floor; data inconsistent");
    if (es.eigenvalues().minCoeff() < 0.0) {
        const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
        V2 = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
        V2 = 0.5 * (V2 + V2.adjoint()).eval();
    }
    return Gep(std::move(H), std::move(V2));
}

inline Gep assemble_gep_time(const SampledSignal& signal, const FilterSystem& filters,
                             int quad_order = -1, double* herm_residual = nullptr) {
    const double T = filters.basis->T();
    if (!signal.covers(-2.0 * T, 2.0 * T))
        throw validation_error("assemble_gep_time: samples must cover [-2T, 2T], have [" +
                               std::to_string(signal.times[0]) + ", " +
                               std::to_string(signal.times[signal.times.size() - 1]) + "]");
    return assemble_gep_time([&](double t) { return signal.interp(t); }, filters, quad_order,
                             herm_residual);
}

inline Gep assemble_gep_time(const DiscreteSignal& model, const FilterSystem& filters,
                             int quad_order = -1, double* herm_residual = nullptr) {
    return assemble_gep_time([&](double t) { return model.eval(t); }, filters, quad_order,
                             herm_residual);
}

/// Frequency-domain GEP assembly from an exact model:
///   V^2_sl = sum_k |a_k|^2 conj(F_s(w_k - w*)) F_l(w_k - w*),
/// and the omega_k-weighted analogue for the left matrix. Exact up to
/// prolate evaluation accuracy; serves as the oracle for the time path.
inline Gep assemble_gep_freq(const DiscreteSignal& model, const FilterSystem& filters) {
    const int M = filters.M;
    const Eigen::MatrixXcd F = filters.alternant(model.omegas);
    Eigen::MatrixXcd V2 = Eigen::MatrixXcd::Zero(M, M), H = Eigen::MatrixXcd::Zero(M, M);
    for (std::size_t k = 0; k < model.omegas.size(); ++k) {
        const Eigen::RowVectorXcd row = F.row(k);
        const Eigen::MatrixXcd outer = row.adjoint() * row;
        V2 += model.amps[k] * outer;
        H += model.amps[k] * model.omegas[k] * outer;
    }
    V2 = 0.5 * (V2 + V2.adjoint()).eval();
    H = 0.5 * (H + H.adjoint()).eval();
    return Gep(std::move(H), std::move(V2));
}

/// Per-frequency detectability ((F^{-2})_kk)^{-1} with F^{-2} = F^{-t} F^{-1}
/// built from the minimum-norm right inverse. Rank-deficient rows come out
/// as zero detectability.
inline Eigen::VectorXd detectability(const Eigen::MatrixXcd& alternant) {
    const Eigen::MatrixXcd Finv = alternant.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::MatrixXcd F2 = Finv.adjoint() * Finv;
    Eigen::VectorXd out(alternant.rows());
    for (Eigen::Index k = 0; k < out.size(); ++k) {
        const double d = F2(k, k).real();
        out[k] = (d > 0.0 && std::isfinite(d)) ? 1.0 / d : 0.0;
    }
    return out;
}

/// Amplitudes |a~_k|^2 = (F^{-t} V^2 F^{-1})_kk at the estimated
/// frequencies; the ordering follows the alternant's row ordering. Rows with
/// vanishing detectability are marked undetectable (NaN).
inline Eigen::VectorXd extract_amplitudes(const Eigen::MatrixXcd& gram,
                                          const Eigen::MatrixXcd& alternant) {
    const Eigen::MatrixXcd Finv = alternant.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::MatrixXcd A = Finv.adjoint() * gram * Finv;
    const Eigen::VectorXd det = detectability(alternant);
    Eigen::VectorXd out(alternant.rows());
    for (Eigen::Index k = 0; k < out.size(); ++k)
        out[k] = det[k] > 0.0 ? A(k, k).real() : std::numeric_limits<double>::quiet_NaN();
    return out;
}

/// Recovered content of one frequency band with certified error intervals.
struct FdResult {
    double omega_center = 0.0;
    double half_width = 0.0;
    int m_detect = 0;
    std::vector<double> omegas_est;       // ascending
    std::vector<double> amps_est;
    std::vector<double> freq_lower;       // enclosure of the true frequency
    std::vector<double> freq_upper;
    std::vector<double> amp_radius;       // enclosure radius of |a_k|^2
    std::vector<double> detectabilities;
    double epsilon_M = 0.0;
    double lam_m_gram = 0.0;
    Eigen::VectorXd gram_spectrum;        // descending
    bool bounds_available = false;
    std::string bounds_reason = "no full-spectrum estimate";
};

/// Run the filter-diagonalization algorithm on an assembled GEP: detect the
/// band dimension from the Gram spectrum against the noise certificate
/// epsilon_M, refine the guess space, and read frequencies and amplitudes
/// off the refined problem. Certified error intervals are filled in later by
/// a full-spectrum pass (see band_sweep / frequency_error_bounds).
inline FdResult run_fd(const Gep& gep, const FilterSystem& filters, double epsilon_M) {
    FdResult res;
    res.omega_center = filters.omega_center;
    res.half_width = filters.W();
    res.epsilon_M = epsilon_M;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gep.gram, Eigen::EigenvaluesOnly);
    res.gram_spectrum = es.eigenvalues().reverse();
    const DetectedDimension det = detect_dimension(res.gram_spectrum, epsilon_M);
    if (det.increase_M)
        throw increase_m_error("run_fd: all " + std::to_string(gep.size()) +
                               " Gram eigenvalues clear epsilon_M; increase M");
    res.m_detect = det.m_detect;
    if (det.m_detect == 0) return res; // empty band

    const RefinedGep refined = refine_guess_space(gep, epsilon_M);
    res.lam_m_gram = refined.conditioning;
    Eigen::VectorXd mu = refined_eigenvalues(refined); // descending
    res.omegas_est.assign(mu.data(), mu.data() + mu.size());
    std::sort(res.omegas_est.begin(), res.omegas_est.end());

    const Eigen::MatrixXcd F = filters.alternant(res.omegas_est);
    const Eigen::VectorXd amps = extract_amplitudes(gep.gram, F);
    const Eigen::VectorXd dets = detectability(F);
    res.amps_est.assign(amps.data(), amps.data() + amps.size());
    res.detectabilities.assign(dets.data(), dets.data() + dets.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.freq_lower.assign(res.omegas_est.size(), nan);
    res.freq_upper.assign(res.omegas_est.size(), nan);
    res.amp_radius.assign(res.omegas_est.size(), nan);
    return res;
}

/// Optional prior knowledge for the coarse bounded-spectrum interval form.
struct SpectrumRange {
    double omega_min = 0.0;
    double omega_max = 0.0;
    bool known = false;
};

/// Fill certified error intervals for the frequencies and amplitudes of one
/// band, using a full-spectrum estimate (typically pooled from all bands) in
/// place of the unknown true values.
///
/// For each recovered omega~_k the enclosure comes from
///   sum_{left tail} (w_l - w_k) |a_l|^2 w_l' / D <= omega~_k - omega_k
///     <= sum_{right tail} (w_l - w_k) |a_l|^2 w_l' / D
/// computed along two routes: the envelope-supremum certificate
/// (w_l' = eps~_M, D = lambda_m - eps~_M C(0)) and the integrated form
/// (w_l' = F_env(w_l - w*), D = lambda_m - Tr[N^2]).  Per side the tighter
/// valid route wins; the coarse bounded-spectrum radius joins in when the
/// spectrum range is known. Amplitude radii follow the three-term
/// perturbation bound evaluated with the alternant derivative at the
/// estimated frequencies (the delta-s offsets are set to zero once the
/// frequency enclosure is narrower than 1e-6 W; wider enclosures keep the
/// same evaluation point and are flagged through bounds_reason).
inline void frequency_error_bounds(FdResult& res, const DiscreteSignal& full_spectrum_estimate,
                                   const FilterSystem& filters, double c0,
                                   const SpectrumRange& range = {}) {
    const double W = filters.W(), ws = filters.omega_center;
    const std::size_t m = res.omegas_est.size();
    if (m == 0) {
        res.bounds_available = true;
        res.bounds_reason.clear();
        return;
    }
    const double eps_tilde = prolate_envelope_sup(*filters.basis, filters.M).epsilon_tilde;

    // noise trace from the estimated out-of-band tones
    double trace_noise = 0.0;
    for (std::size_t l = 0; l < full_spectrum_estimate.omegas.size(); ++l) {
        const double w = full_spectrum_estimate.omegas[l];
        if (std::abs(w - ws) >= W)
            trace_noise += full_spectrum_estimate.amps[l] * filters.envelope(w - ws);
    }
    const double den_env = res.lam_m_gram - eps_tilde * c0;
    const double den_int = res.lam_m_gram - trace_noise;
    if (den_env <= 0.0 && den_int <= 0.0) {
        res.bounds_available = false;
        res.bounds_reason = "denominator non-positive: lambda_m = " +
                            std::to_string(res.lam_m_gram) + ", eps_M = " +
                            std::to_string(eps_tilde * c0) + ", Tr[N^2] = " +
                            std::to_string(trace_noise);
        return;
    }

    for (std::size_t k = 0; k < m; ++k) {
        const double wk = res.omegas_est[k];
        double left_env = 0.0, right_env = 0.0, left_int = 0.0, right_int = 0.0;
        for (std::size_t l = 0; l < full_spectrum_estimate.omegas.size(); ++l) {
            const double w = full_spectrum_estimate.omegas[l];
            const double a2 = full_spectrum_estimate.amps[l];
            if (w < ws - W) {
                left_env += (w - wk) * a2 * eps_tilde;
                left_int += (w - wk) * a2 * filters.envelope(w - ws);
            } else if (w > ws + W) {
                right_env += (w - wk) * a2 * eps_tilde;
                right_int += (w - wk) * a2 * filters.envelope(w - ws);
            }
        }
        double shift_lo = -std::numeric_limits<double>::infinity();
        double shift_hi = std::numeric_limits<double>::infinity();
        if (den_env > 0.0) {
            shift_lo = std::max(shift_lo, left_env / den_env);
            shift_hi = std::min(shift_hi, right_env / den_env);
        }
        if (den_int > 0.0) {
            shift_lo = std::max(shift_lo, left_int / den_int);
            shift_hi = std::min(shift_hi, right_int / den_int);
        }
        if (range.known && den_int > 0.0) {
            const double ratio = trace_noise / res.lam_m_gram;
            shift_lo = std::max(shift_lo, ratio * (range.omega_min - wk));
            shift_hi = std::min(shift_hi, ratio * (range.omega_max - wk));
        }
        // omega~ - omega in [shift_lo, shift_hi]  =>  omega in
        // [omega~ - shift_hi, omega~ - shift_lo]; the eigensolver's own
        // roundoff is not part of the analytic shift, so a machine-scale
        // allowance keeps zero-tail intervals honest
        const double fp = 1e-12 * std::max(1.0, std::abs(wk));
        res.freq_lower[k] = wk - shift_hi - fp;
        res.freq_upper[k] = wk - shift_lo + fp;
    }

    // amplitude radii (three-term perturbation bound)
    const Eigen::MatrixXcd F = filters.alternant(res.omegas_est);
    const Eigen::MatrixXcd Fp = filters.alternant_deriv(res.omegas_est);
    const Eigen::MatrixXcd Finv = F.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::MatrixXcd F2 = Finv.adjoint() * Finv;
    const Eigen::MatrixXcd G = Fp * Finv;        // m x m
    const Eigen::MatrixXcd G2 = G * G;
    const double lam1_noise = std::min(den_env > 0.0 ? eps_tilde * c0
                                                     : std::numeric_limits<double>::infinity(),
                                       den_int > 0.0 ? trace_noise
                                                     : std::numeric_limits<double>::infinity());
    double sup_a_dw2 = 0.0;
    std::vector<double> dw(m);
    bool narrow = true;
    for (std::size_t k = 0; k < m; ++k) {
        dw[k] = std::max(std::abs(res.freq_upper[k] - res.omegas_est[k]),
                         std::abs(res.omegas_est[k] - res.freq_lower[k]));
        if (!(res.freq_upper[k] - res.freq_lower[k] < 1e-6 * W)) narrow = false;
        sup_a_dw2 = std::max(sup_a_dw2, res.amps_est[k] * dw[k] * dw[k]);
    }
    for (std::size_t k = 0; k < m; ++k) {
        res.amp_radius[k] = lam1_noise * F2(k, k).real() +
                            2.0 * dw[k] * res.amps_est[k] * std::abs(G(k, k)) +
                            sup_a_dw2 * std::abs(G2(k, k));
    }
    res.bounds_available = true;
    res.bounds_reason = narrow ? "" : "frequency enclosure wider than 1e-6 W; "
                                      "alternant derivative taken at the estimates";
}

/// One band of a sweep plan.
struct Band {
    double omega_center = 0.0;
    double half_width = 0.0;
};

namespace detail {

inline int sweep_thread_count(std::size_t bands) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("PROLATE_FD_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<unsigned>(v);
    }
    if (n == 0) n = 1;
    return static_cast<int>(std::min<std::size_t>(n, bands));
}

} // namespace detail

/// Run filter diagonalization over a plan of bands sharing one basis, then
/// deduplicate recovered frequencies (nearest-band ownership, merging
/// overlap duplicates) and make a second pass that fills the certified
/// intervals from the pooled spectrum estimate.
///
/// `assemble` maps a band's filter system to its GEP, so the same driver
/// serves the time-domain and the frequency-domain path. c0 is the measured
/// total power C(0). The detection threshold defaults to the envelope
/// certificate C(0) eps~_M; a caller holding a sharper noise estimate may
/// pass it through epsilon_M.
inline std::vector<FdResult> band_sweep(const std::function<Gep(const FilterSystem&)>& assemble,
                                        const std::vector<Band>& plan,
                                        std::shared_ptr<const PswfBasis> basis, int M, double c0,
                                        const SpectrumRange& range = {},
                                        double epsilon_M = -1.0) {
    const double W = basis->W();
    for (const auto& b : plan)
        if (std::abs(b.half_width - W) > 1e-9 * W)
            throw validation_error("band_sweep: half_width must match the basis bandwidth");

    const double eps_M =
        epsilon_M >= 0.0 ? epsilon_M : prolate_envelope_sup(*basis, M).epsilon_M(c0);

    std::vector<FdResult> results(plan.size());
    const int nthreads = detail::sweep_thread_count(plan.size());
    std::vector<std::future<FdResult>> futures(plan.size());
    for (std::size_t start = 0; start < plan.size(); start += nthreads) {
        const std::size_t stop = std::min(plan.size(), start + nthreads);
        for (std::size_t i = start; i < stop; ++i)
            futures[i] = std::async(std::launch::async, [&, i] {
                FilterSystem filters(basis, M, plan[i].omega_center);
                return run_fd(assemble(filters), filters, eps_M);
            });
        for (std::size_t i = start; i < stop; ++i) results[i] = futures[i].get();
    }

    // preliminary bound pass so the merge widths below are meaningful; the
    // pool still carries duplicates, which only widens the intervals
    {
        std::vector<double> pw, pa;
        for (const auto& r : results)
            for (std::size_t k = 0; k < r.omegas_est.size(); ++k) {
                if (std::find(pw.begin(), pw.end(), r.omegas_est[k]) != pw.end()) continue;
                pw.push_back(r.omegas_est[k]);
                pa.push_back(std::isfinite(r.amps_est[k]) ? r.amps_est[k] : 0.0);
            }
        const DiscreteSignal prelim(pw, pa);
        for (std::size_t bidx = 0; bidx < results.size(); ++bidx) {
            FilterSystem filters(basis, M, plan[bidx].omega_center);
            frequency_error_bounds(results[bidx], prelim, filters, c0, range);
        }
    }

    // dedup: collect tones, owner = nearest band center; a tone is dropped
    // when a nearer-owner band reports the same tone within both bounds'
    // merge widths
    struct Tone {
        double omega;
        std::size_t band;
        std::size_t idx;
    };
    std::vector<Tone> tones;
    for (std::size_t bidx = 0; bidx < results.size(); ++bidx)
        for (std::size_t k = 0; k < results[bidx].omegas_est.size(); ++k)
            tones.push_back({results[bidx].omegas_est[k], bidx, k});
    std::sort(tones.begin(), tones.end(), [](const Tone& a, const Tone& b) {
        return a.omega < b.omega || (a.omega == b.omega && a.band < b.band);
    });
    auto merge_width = [&](const Tone& t) {
        const auto& r = results[t.band];
        const double w = r.freq_upper[t.idx] - r.freq_lower[t.idx];
        return std::isfinite(w) && w > 0.0 ? w : 1e-6 * W;
    };
    auto center_dist = [&](const Tone& t) {
        return std::abs(t.omega - plan[t.band].omega_center);
    };
    std::vector<bool> drop(tones.size(), false);
    for (std::size_t i = 0; i + 1 < tones.size(); ++i) {
        const std::size_t j = i + 1;
        if (tones[j].band == tones[i].band) continue;
        const double gap = tones[j].omega - tones[i].omega;
        if (gap < std::min(merge_width(tones[i]), merge_width(tones[j]))) {
            // keep the copy owned by the nearer band center
            const std::size_t loser =
                (center_dist(tones[i]) <= center_dist(tones[j])) ? j : i;
            drop[loser] = true;
        }
    }
    for (std::size_t i = 0; i < tones.size(); ++i) {
        if (!drop[i]) continue;
        auto& r = results[tones[i].band];
        const std::size_t k = tones[i].idx;
        r.omegas_est.erase(r.omegas_est.begin() + k);
        r.amps_est.erase(r.amps_est.begin() + k);
        r.freq_lower.erase(r.freq_lower.begin() + k);
        r.freq_upper.erase(r.freq_upper.begin() + k);
        r.amp_radius.erase(r.amp_radius.begin() + k);
        r.detectabilities.erase(r.detectabilities.begin() + k);
        // indices of later tones in the same band shift down
        for (auto& t : tones)
            if (t.band == tones[i].band && t.idx > k) --t.idx;
    }

    // pooled estimate and the second pass (exact duplicates collapse)
    std::vector<double> pool_w, pool_a;
    for (const auto& r : results)
        for (std::size_t k = 0; k < r.omegas_est.size(); ++k) {
            if (std::find(pool_w.begin(), pool_w.end(), r.omegas_est[k]) != pool_w.end())
                continue;
            pool_w.push_back(r.omegas_est[k]);
            pool_a.push_back(std::isfinite(r.amps_est[k]) ? r.amps_est[k] : 0.0);
        }
    const DiscreteSignal pooled(pool_w, pool_a);
    for (std::size_t bidx = 0; bidx < results.size(); ++bidx) {
        FilterSystem filters(basis, M, plan[bidx].omega_center);
        frequency_error_bounds(results[bidx], pooled, filters, c0, range);
    }
    return results;
}

} // namespace prolate

#endif

