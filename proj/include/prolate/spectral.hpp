#ifndef PROLATE_SPECTRAL_HPP
#define PROLATE_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "prolate/gep.hpp"

namespace prolate {

/// Discrete energy measure of a guess space over the target spectrum:
/// atoms (E, mass) with non-negative masses; integrates to Tr[V^2].
struct SpectralMeasure {
    struct Atom {
        double location;
        double mass;
    };
    std::vector<Atom> atoms;

    [[nodiscard]] double total() const {
        double s = 0.0;
        for (const auto& a : atoms) s += a.mass;
        return s;
    }
    /// Upper-tail mass; the endpoint atom is included (delta distributions at
    /// a discontinuity are evaluated on the right for upper tails).
    [[nodiscard]] double mass_above(double E_b) const {
        double s = 0.0;
        for (const auto& a : atoms)
            if (a.location >= E_b) s += a.mass;
        return s;
    }
    [[nodiscard]] double mass_below(double E_a) const {
        double s = 0.0;
        for (const auto& a : atoms)
            if (a.location <= E_a) s += a.mass;
        return s;
    }
    /// int_{E >= E_b} (E - ref) |alpha(E)|^2 dE over the atomic measure.
    [[nodiscard]] double first_moment_above(double E_b, double ref) const {
        double s = 0.0;
        for (const auto& a : atoms)
            if (a.location >= E_b) s += (a.location - ref) * a.mass;
        return s;
    }
    [[nodiscard]] double first_moment_below(double E_a, double ref) const {
        double s = 0.0;
        for (const auto& a : atoms)
            if (a.location <= E_a) s += (a.location - ref) * a.mass;
        return s;
    }
};

/// Measure of a discrete frequency model seen through a filter envelope:
/// atoms at omega_k with mass |a_k|^2 * env(omega_k).
inline SpectralMeasure
spectral_measure_from_model(const std::vector<double>& frequencies,
                            const std::vector<double>& amplitudes,
                            const std::function<double(double)>& filter_env_at) {
    if (frequencies.size() != amplitudes.size())
        throw validation_error("spectral_measure_from_model: length mismatch");
    SpectralMeasure m;
    m.atoms.reserve(frequencies.size());
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        if (amplitudes[k] < 0.0)
            throw validation_error("spectral_measure_from_model: negative amplitude");
        m.atoms.push_back({frequencies[k], amplitudes[k] * filter_env_at(frequencies[k])});
    }
    return m;
}

/// An eigenvalue enclosure produced by one of the inequality families.
struct DecompositionBound {
    int i = 0;
    double lower = 0.0;
    double upper = 0.0;
    enum class Regime { stability, user_friendly, integrated } regime = Regime::stability;

    [[nodiscard]] bool contains(double x, double slack = 0.0) const {
        return lower - slack <= x && x <= upper + slack;
    }
    [[nodiscard]] double width() const { return upper - lower; }
};

/// Symmetric stability enclosure around mu_i of the signal GEP:
///   |mu_i(V) - mu_i(B)| <= (lambda_1(N^2)/lambda_m(V^2))
///                          max_{j in {1,m}} |mu_j(N) - mu_i(B)|.
/// `mu_bounds_noise` carries (lower, upper) enclosures of mu_m(N), mu_1(N);
/// for the bounded-operator fallback pass (lambda_min(H), lambda_max(H)).
inline DecompositionBound stability_bound(double lam1_noise, double lam_m_gram,
                                          std::pair<double, double> mu_bounds_noise,
                                          double mu_i_signal, int i = 1) {
    if (!(lam_m_gram > 0.0))
        throw validation_error("stability_bound: lambda_m(V^2) must be positive");
    if (lam1_noise < 0.0) throw validation_error("stability_bound: negative noise norm");
    const double reach = std::max(std::abs(mu_bounds_noise.first - mu_i_signal),
                                  std::abs(mu_bounds_noise.second - mu_i_signal));
    const double radius = lam1_noise / lam_m_gram * reach;
    return {i, mu_i_signal - radius, mu_i_signal + radius, DecompositionBound::Regime::stability};
}

/// The two Weyl-type GEP inequalities
///   mu_j(V) <= mu_i(B) + (lambda_{k+sp}(N^2)/lambda_k(V^2)) (mu_l(N) - mu_i(B))
///   mu_j(V) >= mu_i(B) + (lambda_{k-sq}(N^2)/lambda_k(V^2)) (mu_l(N) - mu_i(B))
/// with p = j-i-l-m+2, q = -2m+1+i+l-j, s = sgn(mu_l(N) - mu_i(B)).
/// All eigenvalue lists are descending; indices are 1-based as in the
/// inequalities. An index combination typically validates only one side
/// (the shifted index k+sp resp. k-sq must stay in [1, m]); the other side
/// is then absent. A combination validating neither side is rejected.
struct WeylGepBound {
    std::optional<double> upper;
    std::optional<double> lower;
};

inline WeylGepBound weyl_gep_bound(const std::vector<double>& mu_B,
                                   const std::vector<double>& mu_N,
                                   const std::vector<double>& lam_N2,
                                   const std::vector<double>& lam_V2, int i, int j, int l, int k) {
    const int m = static_cast<int>(mu_B.size());
    if (static_cast<int>(mu_N.size()) != m || static_cast<int>(lam_N2.size()) != m ||
        static_cast<int>(lam_V2.size()) != m)
        throw validation_error("weyl_gep_bound: eigenvalue lists must share length m");
    auto in_range = [m](int idx) { return 1 <= idx && idx <= m; };
    auto check = [&](int idx, const char* name) {
        if (!in_range(idx))
            throw validation_error(std::string("weyl_gep_bound: index ") + name + " = " +
                                   std::to_string(idx) + " outside [1, " + std::to_string(m) + "]");
    };
    check(i, "i");
    check(j, "j");
    check(l, "l");
    check(k, "k");
    if (!(lam_V2[k - 1] > 0.0))
        throw validation_error("weyl_gep_bound: lambda_k(V^2) must be positive");
    const double diff = mu_N[l - 1] - mu_B[i - 1];
    const int s = (diff > 0.0) - (diff < 0.0);
    const int p = j - i - l - m + 2;
    const int q = -2 * m + 1 + i + l - j;
    WeylGepBound out;
    if (in_range(k + s * p))
        out.upper = mu_B[i - 1] + lam_N2[k + s * p - 1] / lam_V2[k - 1] * diff;
    if (in_range(k - s * q))
        out.lower = mu_B[i - 1] + lam_N2[k - s * q - 1] / lam_V2[k - 1] * diff;
    if (!out.upper && !out.lower)
        throw validation_error("weyl_gep_bound: indices k+s*p = " + std::to_string(k + s * p) +
                               " and k-s*q = " + std::to_string(k - s * q) + " both outside [1, " +
                               std::to_string(m) + "]");
    return out;
}

/// Signal condition: both tail integrals of |alpha|^2 weighted by the
/// reciprocal running Gram floor are at most one. The two callbacks return
/// the smallest non-vanishing eigenvalue of the Gram of V restricted below
/// (resp. above) the energy argument.
inline bool is_signal(const SpectralMeasure& measure, double E_a, double E_b,
                      const std::function<double(double)>& lam_m_star_up,
                      const std::function<double(double)>& lam_m_star_down) {
    double up = 0.0, down = 0.0;
    for (const auto& a : measure.atoms) {
        if (a.location >= E_b) {
            const double den = lam_m_star_up(a.location);
            if (!(den > 0.0)) return false;
            up += a.mass / den;
        }
        if (a.location <= E_a) {
            const double den = lam_m_star_down(a.location);
            if (!(den > 0.0)) return false;
            down += a.mass / den;
        }
    }
    return up <= 1.0 && down <= 1.0;
}

/// Certifiable-signal condition: both tail masses divided by
/// lambda_m(V^2) - lambda_1(tail Gram) lie in [0, 1].
inline bool is_certifiable(const SpectralMeasure& measure, double E_a, double E_b, double lam_m,
                           double lam1_tail_low, double lam1_tail_high) {
    const double den_hi = lam_m - lam1_tail_high;
    const double den_lo = lam_m - lam1_tail_low;
    if (!(den_hi > 0.0) || !(den_lo > 0.0)) return false;
    return measure.mass_above(E_b) / den_hi <= 1.0 && measure.mass_below(E_a) / den_lo <= 1.0;
}

/// Sufficient certifiability condition lambda_m(V^2) >= (m+1) lambda_1(N^2).
inline bool certifiable_sufficient(double lam_m, double lam1_noise, int m) {
    return lam_m >= (m + 1) * lam1_noise;
}

/// Integrated enclosure
///   mu_i(V) - mu_i(B) <= int_{E_b}^inf (E - mu_i(B)) |alpha|^2 dE
///                        / (lambda_m(V^2) - lambda_1(V^2)[E_b, inf)),
/// and the mirrored lower bound; both tails integrated exactly over the
/// atomic measure.
inline DecompositionBound integrated_bound(const SpectralMeasure& measure, double lam_m_gram,
                                           double lam1_tail_low, double lam1_tail_high,
                                           double mu_i_signal, double E_a, double E_b, int i = 1) {
    if (!is_certifiable(measure, E_a, E_b, lam_m_gram, lam1_tail_low, lam1_tail_high))
        throw validation_error(
            "integrated_bound: certifiable-signal condition violated (tail mass vs. "
            "lambda_m(V^2) - lambda_1(tail))");
    DecompositionBound out;
    out.i = i;
    out.regime = DecompositionBound::Regime::integrated;
    out.upper = mu_i_signal +
                measure.first_moment_above(E_b, mu_i_signal) / (lam_m_gram - lam1_tail_high);
    out.lower = mu_i_signal +
                measure.first_moment_below(E_a, mu_i_signal) / (lam_m_gram - lam1_tail_low);
    return out;
}

/// Detected dimension: the number of Gram eigenvalues at or above the noise
/// certificate. If every eigenvalue clears the threshold the guess space is
/// proven too small and the guess count must be increased.
struct DetectedDimension {
    int m_detect = 0;
    bool increase_M = false;
};

inline DetectedDimension detect_dimension(const Eigen::VectorXd& gram_eigs_desc,
                                          double epsilon_M) {
    for (int i = 1; i < gram_eigs_desc.size(); ++i)
        if (gram_eigs_desc[i] > gram_eigs_desc[i - 1] + 1e-12 * std::abs(gram_eigs_desc[i]))
            throw validation_error("detect_dimension: eigenvalues must be sorted descending");
    int m = 0;
    for (int i = 0; i < gram_eigs_desc.size(); ++i)
        if (gram_eigs_desc[i] >= epsilon_M) ++m;
    return {m, m == gram_eigs_desc.size()};
}

/// Result of the guess-space refinement: the rotated, truncated GEP with
/// diagonal Gram, its conditioning, and the rotation used.
struct RefinedGep {
    Gep gep;                  // m_detect x m_detect, diagonal Gram
    double conditioning = 0;  // lambda_{m_detect}(V^2)
    int m_detect = 0;
    bool increase_M = false;
    Eigen::MatrixXcd rotation; // M x m_detect leading Gram eigenvectors
};

/// Rotate the GEP into the Gram eigenbasis and keep the m_detect
/// best-conditioned directions; the epsilon-nullspace block is dropped.
inline RefinedGep refine_guess_space(const Gep& gep, double epsilon_M) {
    gep.validate();
    const int M = gep.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gep.gram);
    Eigen::VectorXd ev(M);
    Eigen::MatrixXcd U(M, M);
    for (int j = 0; j < M; ++j) {
        ev[j] = es.eigenvalues()[M - 1 - j];
        U.col(j) = es.eigenvectors().col(M - 1 - j);
    }
    const DetectedDimension det = detect_dimension(ev, epsilon_M);
    if (det.m_detect == 0)
        throw dimension_error("refine_guess_space: no Gram eigenvalue clears epsilon_M");
    const int m = det.m_detect;
    RefinedGep out;
    out.m_detect = m;
    out.increase_M = det.increase_M;
    out.conditioning = ev[m - 1];
    out.rotation = U.leftCols(m);
    Eigen::MatrixXcd h = out.rotation.adjoint() * gep.h_v * out.rotation;
    h = 0.5 * (h + h.adjoint());
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
    g.diagonal() = ev.head(m).cast<std::complex<double>>();
    out.gep = Gep(std::move(h), std::move(g));
    return out;
}

/// Eigenvalues of a refined GEP via the diagonal whitening
/// Lambda^{-1/2} H* Lambda^{-1/2}, descending.
inline Eigen::VectorXd refined_eigenvalues(const RefinedGep& r) {
    const int m = r.m_detect;
    Eigen::VectorXd d = r.gep.gram.diagonal().real();
    Eigen::VectorXd inv_sqrt = d.array().rsqrt();
    Eigen::MatrixXcd A = inv_sqrt.asDiagonal() * r.gep.h_v * inv_sqrt.asDiagonal();
    A = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
    Eigen::VectorXd mu(m);
    for (int j = 0; j < m; ++j) mu[j] = es.eigenvalues()[m - 1 - j];
    return mu;
}

/// Verify monotonicity of generalized eigenvalues and Gram eigenvalues over
/// an upward family of cutoff GEPs (V restricted to energies below
/// increasing cutoffs). Optionally checks the Weyl gap
///   lambda_i(E_{j+1}) - lambda_i(E_j) >= lambda_min(V^2[E_j, E_{j+1})) >= 0
/// when the interval Grams are supplied.
struct MonotonicityReport {
    bool mu_monotone = true;
    bool gram_monotone = true;
    bool weyl_gap_ok = true;
    double worst_mu_violation = 0.0;
    double worst_gram_violation = 0.0;
};

inline MonotonicityReport
monotonicity_check(const std::vector<Gep>& upward_family,
                   const std::vector<Eigen::MatrixXcd>& interval_grams = {},
                   double kernel_tol = 1e-10, double slack = 1e-9) {
    MonotonicityReport rep;
    std::vector<Eigen::VectorXd> mus, gram_eigs;
    for (const auto& g : upward_family) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.gram, Eigen::EigenvaluesOnly);
        gram_eigs.push_back(es.eigenvalues().reverse());
        const double tol = kernel_tol * std::max(1e-300, es.eigenvalues().maxCoeff());
        int rank = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()[i] > tol) ++rank;
        if (rank == 0) {
            mus.push_back(Eigen::VectorXd());
            continue;
        }
        mus.push_back(solve_gep(g, tol).proper());
    }
    for (std::size_t j = 0; j + 1 < upward_family.size(); ++j) {
        const auto &a = mus[j], &b = mus[j + 1];
        for (int i = 0; i < a.size() && i < b.size(); ++i) {
            const double viol = a[i] - b[i]; // positive = violation
            rep.worst_mu_violation = std::max(rep.worst_mu_violation, viol);
            if (viol > slack * std::max(1.0, std::abs(a[i]))) rep.mu_monotone = false;
        }
        for (int i = 0; i < gram_eigs[j].size() && i < gram_eigs[j + 1].size(); ++i) {
            const double viol = gram_eigs[j][i] - gram_eigs[j + 1][i];
            rep.worst_gram_violation = std::max(rep.worst_gram_violation, viol);
            if (viol > slack * std::max(1.0, std::abs(gram_eigs[j][i])))
                rep.gram_monotone = false;
        }
        if (j < interval_grams.size() && interval_grams[j].size() > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ei(interval_grams[j],
                                                               Eigen::EigenvaluesOnly);
            const double lam_min_interval = ei.eigenvalues().minCoeff();
            for (int i = 0; i < gram_eigs[j].size(); ++i) {
                const double gap = gram_eigs[j + 1][i] - gram_eigs[j][i];
                if (gap + slack < lam_min_interval) rep.weyl_gap_ok = false;
            }
        }
    }
    return rep;
}

} // namespace prolate

#endif
