#ifndef PROLATE_TRIALS_HPP
#define PROLATE_TRIALS_HPP

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "prolate/spectral.hpp"

namespace prolate {
namespace trials {

/// A constructed dimension-reduction instance in the eigenbasis of a random
/// hermitian target: H = diag(h_eigs) (descending), guess matrix V = B + N
/// with B supported on a contiguous spectral block and N on its complement.
struct Instance {
    Eigen::VectorXd h_eigs; // descending
    Eigen::MatrixXcd B, N, V;
    int signal_start = 0; // block [signal_start, signal_start + signal_dim)
    int signal_dim = 0;
    double E_a = 0.0, E_b = 0.0; // open interval enclosing exactly the block

    [[nodiscard]] Gep gep_of(const Eigen::MatrixXcd& X) const {
        Eigen::MatrixXcd hv = X.adjoint() * h_eigs.asDiagonal().toDenseMatrix() * X;
        hv = 0.5 * (hv + hv.adjoint()).eval();
        Eigen::MatrixXcd g = X.adjoint() * X;
        g = 0.5 * (g + g.adjoint()).eval();
        return Gep(std::move(hv), std::move(g));
    }
    [[nodiscard]] Gep gep() const { return gep_of(V); }

    [[nodiscard]] std::vector<double> signal_eigs() const {
        std::vector<double> out;
        for (int i = 0; i < signal_dim; ++i) out.push_back(h_eigs[signal_start + i]);
        return out;
    }
    [[nodiscard]] double lam1_noise_sq() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(N.adjoint() * N,
                                                           Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }
    [[nodiscard]] Eigen::VectorXd gram_eigs_desc(const Eigen::MatrixXcd& X) const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X.adjoint() * X,
                                                           Eigen::EigenvaluesOnly);
        return es.eigenvalues().reverse();
    }

    /// Restriction of V to eigen-rows with eigenvalue in the energy set.
    template <typename Pred>
    [[nodiscard]] Eigen::MatrixXcd restrict_rows(Pred keep) const {
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(V.rows(), V.cols());
        for (int r = 0; r < V.rows(); ++r)
            if (keep(h_eigs[r])) out.row(r) = V.row(r);
        return out;
    }

    /// Atomic spectral measure of the instance: mass sum_l |V_{kl}|^2 at each
    /// eigenvalue.
    [[nodiscard]] SpectralMeasure measure() const {
        SpectralMeasure m;
        for (int r = 0; r < V.rows(); ++r) m.atoms.push_back({h_eigs[r], V.row(r).squaredNorm()});
        return m;
    }
};

/// Build a random instance: dim-D hermitian target, M guess vectors,
/// signal block of size m_signal, noise entries scaled by noise_scale.
inline Instance make_instance(std::mt19937_64& rng, int D, int M, int m_signal,
                              double noise_scale) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> pick_start(0, D - m_signal);
    Instance inst;
    Eigen::VectorXd h(D);
    for (int i = 0; i < D; ++i) h[i] = gauss(rng);
    std::sort(h.data(), h.data() + D, std::greater<>());
    // keep eigenvalues separated so interval edges are well defined
    for (int i = 1; i < D; ++i)
        if (h[i - 1] - h[i] < 1e-3) h[i] = h[i - 1] - 1e-3;
    inst.h_eigs = h;
    inst.signal_dim = m_signal;
    inst.signal_start = pick_start(rng);
    const int s = inst.signal_start;
    inst.E_b = (s == 0) ? h[0] + 1.0 : 0.5 * (h[s - 1] + h[s]);
    inst.E_a = (s + m_signal == D) ? h[D - 1] - 1.0 : 0.5 * (h[s + m_signal - 1] + h[s + m_signal]);

    inst.B = Eigen::MatrixXcd::Zero(D, M);
    inst.N = Eigen::MatrixXcd::Zero(D, M);
    for (int c = 0; c < M; ++c) {
        for (int r = 0; r < D; ++r) {
            const std::complex<double> z{gauss(rng), gauss(rng)};
            const bool in_signal = (r >= s && r < s + m_signal);
            if (in_signal)
                inst.B(r, c) = z;
            else
                inst.N(r, c) = noise_scale * z;
        }
    }
    inst.V = inst.B + inst.N;
    return inst;
}

/// Outcome of one randomized containment trial.
struct TrialResult {
    bool ok = true;
    double worst = 0.0; // most positive violation seen (<= 0 means contained)
    std::string what;
};

/// Spectral-stability family: |mu_i(V) - lambda_{I,i}| within the stability
/// radius built from mu_{1,m}(H,N).
inline TrialResult trial_stability(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(8, 12), msz(2, 4);
    const int D = dim(rng);
    const int M = msz(rng);
    const Instance inst = make_instance(rng, D, M, M, 0.05);
    TrialResult res;
    res.what = "stability";
    const GepSolution solV = solve_gep(inst.gep());
    if (solV.rank != M) return res; // rank collapse: theorem hypotheses void
    const GepSolution solN = solve_gep(inst.gep_of(inst.N));
    if (solN.rank != M) return res;
    const double lam1N = inst.lam1_noise_sq();
    const double lamM = inst.gram_eigs_desc(inst.V)[M - 1];
    const auto lamI = inst.signal_eigs();
    for (int i = 0; i < M; ++i) {
        const auto bound = stability_bound(lam1N, lamM, {solN.mu[M - 1], solN.mu[0]}, lamI[i], i);
        const double viol = std::max(bound.lower - solV.mu[i], solV.mu[i] - bound.upper);
        res.worst = std::max(res.worst, viol);
        if (viol > 1e-10) res.ok = false;
    }
    return res;
}

/// Bounded-operator fallback: min_j |mu_i(V) - lambda_j(H)| within
/// (lambda_1(N^2)/lambda_m(V^2)) (lambda_max - lambda_min).
inline TrialResult trial_user_friendly(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(8, 12), msz(2, 4);
    const int D = dim(rng);
    const int M = msz(rng);
    const Instance inst = make_instance(rng, D, M, M, 0.08);
    TrialResult res;
    res.what = "user_friendly";
    const GepSolution solV = solve_gep(inst.gep());
    if (solV.rank != M) return res;
    const double radius = inst.lam1_noise_sq() / inst.gram_eigs_desc(inst.V)[M - 1] *
                          (inst.h_eigs[0] - inst.h_eigs[inst.h_eigs.size() - 1]);
    for (int i = 0; i < M; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (int j = 0; j < inst.h_eigs.size(); ++j)
            nearest = std::min(nearest, std::abs(solV.mu[i] - inst.h_eigs[j]));
        res.worst = std::max(res.worst, nearest - radius);
        if (nearest > radius + 1e-10) res.ok = false;
    }
    return res;
}

/// The two-sided Weyl-type inequalities at random valid index combinations.
inline TrialResult trial_weyl(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(8, 12), msz(3, 5);
    const int D = dim(rng);
    const int M = msz(rng);
    const Instance inst = make_instance(rng, D, M, M, 0.05);
    TrialResult res;
    res.what = "weyl";
    const GepSolution solV = solve_gep(inst.gep());
    const GepSolution solB = solve_gep(inst.gep_of(inst.B));
    const GepSolution solN = solve_gep(inst.gep_of(inst.N));
    if (solV.rank != M || solB.rank != M || solN.rank != M) return res;
    std::vector<double> muB(solB.mu.data(), solB.mu.data() + M);
    std::vector<double> muN(solN.mu.data(), solN.mu.data() + M);
    Eigen::VectorXd lamN2v = inst.gram_eigs_desc(inst.N);
    Eigen::VectorXd lamV2v = inst.gram_eigs_desc(inst.V);
    std::vector<double> lamN2(lamN2v.data(), lamN2v.data() + M);
    std::vector<double> lamV2(lamV2v.data(), lamV2v.data() + M);
    std::uniform_int_distribution<int> idx(1, M);
    int tried = 0;
    for (int attempt = 0; attempt < 60 && tried < 10; ++attempt) {
        const int i = idx(rng), j = idx(rng), l = idx(rng), k = idx(rng);
        WeylGepBound bnd;
        try {
            bnd = weyl_gep_bound(muB, muN, lamN2, lamV2, i, j, l, k);
        } catch (const validation_error&) {
            continue; // neither side valid at this combination, resample
        }
        ++tried;
        const double mj = solV.mu[j - 1];
        double viol = 0.0;
        if (bnd.upper) viol = std::max(viol, mj - *bnd.upper);
        if (bnd.lower) viol = std::max(viol, *bnd.lower - mj);
        res.worst = std::max(res.worst, viol);
        if (viol > 1e-10) res.ok = false;
    }
    return res;
}

/// Integrated enclosure of mu_i(V) around the signal eigenvalues.
inline TrialResult trial_integrated(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(8, 12), msz(2, 4);
    const int D = dim(rng);
    const int M = msz(rng);
    const Instance inst = make_instance(rng, D, M, M, 0.04);
    TrialResult res;
    res.what = "integrated";
    const GepSolution solV = solve_gep(inst.gep());
    if (solV.rank != M) return res;
    const SpectralMeasure meas = inst.measure();
    const double lamM = inst.gram_eigs_desc(inst.V)[M - 1];
    const Eigen::MatrixXcd lowV =
        inst.restrict_rows([&](double e) { return e <= inst.E_a; });
    const Eigen::MatrixXcd highV =
        inst.restrict_rows([&](double e) { return e >= inst.E_b; });
    const double lam1_low = inst.gram_eigs_desc(lowV)[0];
    const double lam1_high = inst.gram_eigs_desc(highV)[0];
    if (!is_certifiable(meas, inst.E_a, inst.E_b, lamM, lam1_low, lam1_high)) return res;
    const auto lamI = inst.signal_eigs();
    for (int i = 0; i < M; ++i) {
        const auto bound =
            integrated_bound(meas, lamM, lam1_low, lam1_high, lamI[i], inst.E_a, inst.E_b, i);
        const double viol = std::max(bound.lower - solV.mu[i], solV.mu[i] - bound.upper);
        res.worst = std::max(res.worst, viol);
        if (viol > 1e-10) res.ok = false;
    }
    return res;
}

/// Dimension detection: with epsilon >= lambda_1(N^2) the detected dimension
/// never exceeds the true one, and equals it when lambda_{m_true}(V^2) is at
/// least ten times the threshold.
inline TrialResult trial_detection(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(8, 12), msz(2, 4), over(0, 3);
    std::uniform_real_distribution<double> eps_factor(1.0, 3.0);
    const int D = dim(rng);
    const int m_true = msz(rng);
    const int M = std::min(m_true + over(rng), D - m_true);
    const Instance inst = make_instance(rng, D, M, m_true, 0.02);
    TrialResult res;
    res.what = "detection";
    const double lam1N = inst.lam1_noise_sq();
    const double eps = eps_factor(rng) * std::max(lam1N, 1e-14);
    const Eigen::VectorXd ge = inst.gram_eigs_desc(inst.V);
    const DetectedDimension det = detect_dimension(ge, eps);
    if (det.m_detect > m_true) {
        res.ok = false;
        res.worst = det.m_detect - m_true;
    }
    const int m_avail = std::min(m_true, M);
    if (ge[m_avail - 1] >= 10.0 * eps && det.m_detect != m_avail) {
        res.ok = false;
        res.worst = std::max(res.worst, 1.0);
    }
    return res;
}

/// Monotonicity of cutoff families V^(E) in E, plus the Weyl gap on the Gram
/// eigenvalues.
inline TrialResult trial_monotonicity(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(8, 12), msz(2, 4);
    const int D = dim(rng);
    const int M = msz(rng);
    const Instance inst = make_instance(rng, D, M, M, 0.5);
    TrialResult res;
    res.what = "monotonicity";
    // cutoffs at three interior eigenvalue midpoints
    std::vector<double> cuts = {0.5 * (inst.h_eigs[D - 1] + inst.h_eigs[D - 2]),
                                0.5 * (inst.h_eigs[D / 2] + inst.h_eigs[D / 2 - 1]),
                                inst.h_eigs[0] + 1.0};
    std::vector<Gep> family;
    std::vector<Eigen::MatrixXcd> interval_grams;
    for (std::size_t j = 0; j < cuts.size(); ++j) {
        const Eigen::MatrixXcd Vj = inst.restrict_rows([&](double e) { return e < cuts[j]; });
        family.push_back(inst.gep_of(Vj));
        if (j + 1 < cuts.size()) {
            const Eigen::MatrixXcd Vint = inst.restrict_rows(
                [&](double e) { return e >= cuts[j] && e < cuts[j + 1]; });
            interval_grams.push_back(Vint.adjoint() * Vint);
        }
    }
    const MonotonicityReport rep = monotonicity_check(family, interval_grams);
    res.ok = rep.mu_monotone && rep.gram_monotone && rep.weyl_gap_ok;
    res.worst = std::max(rep.worst_mu_violation, rep.worst_gram_violation);
    return res;
}

} // namespace trials
} // namespace prolate

#endif
