#ifndef PROLATE_QUADRATURE_HPP
#define PROLATE_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "prolate/errors.hpp"

namespace prolate {

/// Nodes and weights of a quadrature rule on some interval.
struct QuadRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    [[nodiscard]] Eigen::Index size() const { return nodes.size(); }

    /// Rule mapped affinely from the current interval to [a, b],
    /// assuming the current rule lives on [-1, 1].
    [[nodiscard]] QuadRule mapped_to(double a, double b) const {
        QuadRule out;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        out.nodes = (half * nodes.array() + mid).matrix();
        out.weights = half * weights;
        return out;
    }

    template <typename F>
    [[nodiscard]] auto integrate(F&& f) const {
        using R = decltype(f(0.0));
        R acc{};
        for (Eigen::Index i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

/// Gauss-Legendre rule of order n on [-1, 1]. Newton iteration on the
/// Legendre recurrence; nodes accurate to machine precision for n up to
/// several thousand.
inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw validation_error("gauss_legendre: order must be >= 1");
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            double pkm1 = 1.0, pk = x;
            for (int k = 1; k < n; ++k) {
                const double pkp1 = ((2 * k + 1) * x * pk - k * pkm1) / (k + 1);
                pkm1 = pk;
                pk = pkp1;
            }
            dp = n * (x * pk - pkm1) / (x * x - 1.0);
            if (converged) break; // one extra pass refreshes dp at the root
            const double dx = pk / dp;
            x -= dx;
            converged = std::abs(dx) < 1e-15;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;          // ascending order, exploiting symmetry
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

/// Composite Gauss-Legendre rule: `panels` equal panels over [a, b],
/// `order` nodes per panel.
inline QuadRule composite_gauss_legendre(double a, double b, int panels, int order) {
    if (panels < 1) throw validation_error("composite_gauss_legendre: panels must be >= 1");
    const QuadRule base = gauss_legendre(order);
    QuadRule out;
    out.nodes.resize(static_cast<Eigen::Index>(panels) * order);
    out.weights.resize(static_cast<Eigen::Index>(panels) * order);
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const QuadRule seg = base.mapped_to(a + p * h, a + (p + 1) * h);
        out.nodes.segment(static_cast<Eigen::Index>(p) * order, order) = seg.nodes;
        out.weights.segment(static_cast<Eigen::Index>(p) * order, order) = seg.weights;
    }
    return out;
}

/// Composite rule over [a, b] with panel length at most `max_panel`.
inline QuadRule panelized_gauss_legendre(double a, double b, double max_panel, int order) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    return composite_gauss_legendre(a, b, panels, order);
}

/// Integrate with doubling of the order until two successive results agree
/// to `rel_tol` relative, starting from `order`. Integrand smooth.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, int order = 200, double rel_tol = 1e-12,
                          int max_doublings = 4) {
    double prev = gauss_legendre(order).mapped_to(a, b).integrate(f);
    for (int d = 0; d < max_doublings; ++d) {
        order *= 2;
        const double cur = gauss_legendre(order).mapped_to(a, b).integrate(f);
        if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace prolate

#endif
