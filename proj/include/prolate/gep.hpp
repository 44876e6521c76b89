#ifndef PROLATE_GEP_HPP
#define PROLATE_GEP_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "prolate/errors.hpp"

namespace prolate {

/// Hermitian generalized eigenvalue problem H_V x = mu V^2 x built from a
/// guess-vector matrix V: the left side is V^dagger H V and the Gram matrix
/// is V^dagger V (positive semidefinite).
struct Gep {
    Eigen::MatrixXcd h_v;
    Eigen::MatrixXcd gram;

    Gep() = default;
    Gep(Eigen::MatrixXcd h, Eigen::MatrixXcd g) : h_v(std::move(h)), gram(std::move(g)) {
        validate();
    }

    [[nodiscard]] int size() const { return static_cast<int>(gram.rows()); }

    void validate() const {
        if (h_v.rows() != h_v.cols() || gram.rows() != gram.cols() || h_v.rows() != gram.rows())
            throw validation_error("Gep: matrices must be square and of equal size");
        const double hs = std::max(1e-300, h_v.norm());
        const double gs = std::max(1e-300, gram.norm());
        if ((h_v - h_v.adjoint()).norm() > 1e-12 * hs)
            throw validation_error("Gep: left matrix is not hermitian");
        if ((gram - gram.adjoint()).norm() > 1e-12 * gs)
            throw validation_error("Gep: Gram matrix is not hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-12 * gs)
            throw validation_error("Gep: Gram matrix is not positive semidefinite");
    }
};

/// Solution of a hermitian GEP: proper eigenvalues in descending order
/// (spurious entries set to zero), eigenvectors Gram-orthonormal.
struct GepSolution {
    Eigen::VectorXd mu;    // length M; entries [0, rank) proper, rest zero
    Eigen::MatrixXcd phi;  // M x rank, Phi^dagger Gram Phi = I
    int rank = 0;

    [[nodiscard]] Eigen::VectorXd proper() const { return mu.head(rank); }
};

/// Default numerical-kernel threshold: M * eps * lambda_1(gram).
inline double default_kernel_tol(const Eigen::MatrixXcd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    return gram.rows() * std::numeric_limits<double>::epsilon() * es.eigenvalues().maxCoeff();
}

/// Solve a hermitian GEP by the constructive route: diagonalize the Gram
/// matrix, whiten on the non-kernel block, diagonalize the whitened left
/// matrix. Exposes the kernel block explicitly and degrades gracefully on
/// semidefinite Grams.
inline GepSolution solve_gep(const Gep& gep, double kernel_tol = -1.0) {
    gep.validate();
    const int M = gep.size();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gep.gram);
    if (es.info() != Eigen::Success) throw consistency_error("solve_gep: Gram eigensolve failed");
    const Eigen::VectorXd ev = es.eigenvalues(); // ascending
    if (kernel_tol < 0.0)
        kernel_tol = M * std::numeric_limits<double>::epsilon() * ev.maxCoeff();

    int rank = 0;
    for (int i = 0; i < M; ++i)
        if (ev[i] > kernel_tol) ++rank;
    if (rank == 0) throw dimension_error("solve_gep: kernel_tol leaves rank zero");

    Eigen::MatrixXcd U(M, rank);
    Eigen::VectorXd lam(rank);
    for (int j = 0; j < rank; ++j) { // descending Gram eigenvalues
        U.col(j) = es.eigenvectors().col(M - 1 - j);
        lam[j] = ev[M - 1 - j];
    }
    const Eigen::VectorXd inv_sqrt = lam.array().rsqrt();
    const Eigen::MatrixXcd white = U * inv_sqrt.asDiagonal();
    Eigen::MatrixXcd A = white.adjoint() * gep.h_v * white;
    A = 0.5 * (A + A.adjoint()); // clean roundoff asymmetry

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(A);
    if (ea.info() != Eigen::Success) throw consistency_error("solve_gep: projected eigensolve failed");

    GepSolution sol;
    sol.rank = rank;
    sol.mu = Eigen::VectorXd::Zero(M);
    sol.phi.resize(M, rank);
    for (int j = 0; j < rank; ++j) { // descending over proper eigenvalues
        sol.mu[j] = ea.eigenvalues()[rank - 1 - j];
        sol.phi.col(j) = white * ea.eigenvectors().col(rank - 1 - j);
    }
    return sol;
}

/// Generalized Rayleigh quotient <x, H_V x> / <x, V^2 x>. Vectors in the
/// numerical kernel of the Gram matrix are spurious; no value is returned
/// for them.
inline std::optional<double> rayleigh(const Gep& gep, const Eigen::VectorXcd& x,
                                      double kernel_tol = -1.0) {
    if (x.size() != gep.size()) throw validation_error("rayleigh: dimension mismatch");
    const double den = (x.adjoint() * gep.gram * x).real()(0, 0);
    if (kernel_tol < 0.0) kernel_tol = default_kernel_tol(gep.gram);
    if (den <= kernel_tol * x.squaredNorm()) return std::nullopt;
    return (x.adjoint() * gep.h_v * x).real()(0, 0) / den;
}

/// True iff every proper eigenvalue lies in [lambda_min, lambda_max].
inline bool spectral_range_check(const Gep& gep, double lambda_min, double lambda_max,
                                 double kernel_tol = -1.0) {
    const GepSolution s = solve_gep(gep, kernel_tol);
    for (int i = 0; i < s.rank; ++i)
        if (s.mu[i] < lambda_min || s.mu[i] > lambda_max) return false;
    return true;
}

/// Max deviation between the proper eigenvalues of a GEP assembled from a
/// spectral subspace and the subspace eigenvalues, matched in descending
/// order.
inline double coincidence_check(const Gep& gep, std::vector<double> target_eigs,
                                double kernel_tol = -1.0) {
    const GepSolution s = solve_gep(gep, kernel_tol);
    if (static_cast<int>(target_eigs.size()) != s.rank)
        throw dimension_error("coincidence_check: rank " + std::to_string(s.rank) +
                              " does not match " + std::to_string(target_eigs.size()) +
                              " target eigenvalues");
    std::sort(target_eigs.begin(), target_eigs.end(), std::greater<>());
    double worst = 0.0;
    for (int i = 0; i < s.rank; ++i) worst = std::max(worst, std::abs(s.mu[i] - target_eigs[i]));
    return worst;
}

} // namespace prolate

#endif
