#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "prolate/bounds.hpp"

using namespace prolate;
using Catch::Approx;

TEST_CASE("bound report internal identities") {
    const PswfBasis b = build_basis(BandTimeSpec::from_c_T(10.0, 1.0), 10);
    const double T = b.T();
    for (int n : {0, 2, 5, 8}) {
        const BoundReport r = bound_report(b, n);
        // split of the derivative energy, two independent quadrature routes
        REQUIRE(r.deriv_T_sq + r.deriv_out_sq == Approx(r.deriv_inf_sq).epsilon(1e-9));
        REQUIRE(r.c_n * r.c_n ==
                Approx(r.deriv_inf_sq + b.lambda[n] * b.lambda[n] / (4.0 * T * T)).epsilon(1e-12));
        // printed derivative-concentration identities (squared prefactors)
        REQUIRE(r.deriv_T_sq == Approx(b.gamma[n] * r.c_intra * r.c_intra).epsilon(1e-7));
        REQUIRE(r.deriv_out_sq ==
                Approx(b.one_minus_gamma[n] * r.c_extra * r.c_extra).epsilon(1e-7));
    }
}

TEST_CASE("window derivative energy identity with the edge term") {
    const PswfBasis b = build_basis(BandTimeSpec::from_c_T(8.0, 1.0), 8);
    for (int n = 0; n < 8; ++n) {
        const BoundReport r = bound_report(b, n);
        const double xiT = eval_xi(b, n, b.T());
        const double dxiT = eval_xi_deriv(b, n, b.T());
        const double rhs = b.gamma[n] * r.deriv_inf_sq + 2.0 * xiT * dxiT;
        REQUIRE(r.deriv_T_sq == Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("supremum bounds hold inside and outside the window") {
    for (double c : {5.0, 10.0}) {
        const BandTimeSpec spec = BandTimeSpec::from_c_T(c, 1.0);
        const PswfBasis b = build_basis(spec, static_cast<int>(std::ceil(spec.c_tilde)) + 5);
        const int n_hi = std::min(b.count - 1, static_cast<int>(std::ceil(spec.c_tilde)) + 2);
        for (int n = 0; n <= n_hi; ++n) {
            const BoundReport r = bound_report(b, n);
            REQUIRE(r.sup_out_numeric <= b.one_minus_gamma[n] * r.c_extra * (1 + 1e-9));
            REQUIRE(r.sup_in_numeric <= b.gamma[n] * r.c_intra_tilde * (1 + 1e-9));
        }
    }
}

TEST_CASE("prefactor estimate in the negative-lambda regime") {
    const PswfBasis b = build_basis(BandTimeSpec::from_c_T(10.0, 1.0), 8);
    const double T = b.T();
    for (int n = 0; n < 6; ++n) {
        if (b.lambda[n] >= 0.0) continue;
        const BoundReport r = bound_report(b, n);
        REQUIRE(r.c_extra <= (r.c_n - b.lambda[n] / (2.0 * T)) * (1 + 1e-12));
        REQUIRE(r.c_intra < b.W());
    }
}

TEST_CASE("norm of the derivative stays below W") {
    const PswfBasis b = build_basis(BandTimeSpec::from_c_T(6.0, 0.5), 8);
    for (int n = 0; n < 8; ++n)
        REQUIRE(std::sqrt(detail::deriv_energy_total(b, n)) < b.W());
}

TEST_CASE("edge bounds") {
    const PswfBasis b = build_basis(BandTimeSpec::from_c_T(10.0, 1.0), 6);
    const double xi1T = eval_xi(b, 1, b.T());
    const EdgeBounds e1 = edge_bounds(b, 1);
    REQUIRE(e1.intra_applicable);
    REQUIRE(xi1T * xi1T <= e1.extra_bound);
    REQUIRE(xi1T * xi1T <= e1.intra_bound);
    const EdgeBounds e0 = edge_bounds(b, 0);
    REQUIRE_FALSE(e0.intra_applicable);
}

TEST_CASE("asymptotic exterior supremum") {
    const BandTimeSpec spec = BandTimeSpec::from_c_T(10.0, 1.0);
    const double expect =
        spec.W * 4.0 * std::sqrt(pi) * std::pow(10.0, 1.5) * std::exp(-20.0) * (1.0 - 35.0 / 320.0);
    REQUIRE(asymptotic_sup_extra(spec, 0) == Approx(expect).epsilon(1e-14));
    // increasing in n to leading order (n <= 2c)
    REQUIRE(asymptotic_sup_extra(spec, 1) > asymptotic_sup_extra(spec, 0));
    REQUIRE(asymptotic_sup_extra(spec, 2) > asymptotic_sup_extra(spec, 1));
    // the asymptotic substitutes the edge bound for xi(T)^2/(1-gamma), so it
    // sits above the exact product by a moderate factor (about 3.9 at c=15)
    const BandTimeSpec s15 = BandTimeSpec::from_c_T(15.0, 1.0);
    const PswfBasis b15 = build_basis(s15, 4);
    for (int n = 0; n <= 3; ++n) {
        const BoundReport r = bound_report(b15, n);
        const double exact = b15.one_minus_gamma[n] * r.c_extra;
        REQUIRE(asymptotic_sup_extra(s15, n) >= exact);
        REQUIRE(asymptotic_sup_extra(s15, n) <= 5.0 * exact);
    }
}

TEST_CASE("coarse exterior prefactor") {
    const CoarseCExtra ce = c_extra_coarse(10.0, 2.0);
    REQUIRE(ce.exact == Approx(2.0 * (std::sqrt(26.0) + 5.0)).epsilon(1e-15));
    REQUIRE(ce.expansion == Approx(2.0 * 10.1).epsilon(1e-15));
    REQUIRE(ce.exact == Approx(ce.expansion).epsilon(2e-4));
    REQUIRE(c_extra_coarse(0.0, 3.0).exact == Approx(3.0).epsilon(1e-15));
    // exact >= leading expansion terms across regimes
    for (double c = 0.05; c < 40.0; c *= 1.37) {
        const CoarseCExtra v = c_extra_coarse(c, 1.0);
        REQUIRE(v.exact >= (c >= 1.0 ? c : 1.0));
    }
}

TEST_CASE("underflow of 1 - gamma is reported") {
    PswfBasis b = build_basis(BandTimeSpec::from_c_T(4.0, 1.0), 2);
    b.one_minus_gamma[0] = 0.0; // simulate total underflow
    REQUIRE_THROWS_AS(bound_report(b, 0), consistency_error);
}
