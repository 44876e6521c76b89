#ifndef PROLATE_TOOLS_COMMANDS_HPP
#define PROLATE_TOOLS_COMMANDS_HPP

#include <cstdio>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "prolate/bounds.hpp"
#include "prolate/filter_diag.hpp"
#include "prolate/io.hpp"
#include "prolate/pswf.hpp"
#include "prolate/sampling.hpp"
#include "prolate/trials.hpp"

namespace prolate_cli {

// exit codes: 0 success, 2 validation, 3 numeric-consistency failure, 4 I/O
enum ExitCode { exit_ok = 0, exit_validation = 2, exit_consistency = 3, exit_io = 4 };

struct BasisArgs {
    std::optional<double> c, T, W;
    int N = 8;
    int quad_order = 200;
    std::string out;
};

inline int cmd_basis(const BasisArgs& a, std::ostream& log) {
    const int given = int(a.c.has_value()) + int(a.T.has_value()) + int(a.W.has_value());
    if (given != 2) {
        log << "basis: exactly two of --c/--T/--W must be given\n";
        return exit_validation;
    }
    double T, W;
    if (a.c && a.T) {
        if (*a.c <= 0 || *a.T <= 0) {
            log << "basis: c and T must be positive\n";
            return exit_validation;
        }
        T = *a.T;
        W = *a.c / *a.T;
    } else if (a.c && a.W) {
        if (*a.c <= 0 || *a.W <= 0) {
            log << "basis: c and W must be positive\n";
            return exit_validation;
        }
        W = *a.W;
        T = *a.c / *a.W;
    } else {
        if (*a.T <= 0 || *a.W <= 0) {
            log << "basis: T and W must be positive\n";
            return exit_validation;
        }
        T = *a.T;
        W = *a.W;
    }
    try {
        const prolate::PswfBasis b =
            prolate::build_basis(prolate::BandTimeSpec(T, W), a.N, a.quad_order);
        prolate::io::write_file(a.out, prolate::io::basis_to_json(b));
        log << "# c = " << prolate::io::fmt(b.c()) << ", T = " << prolate::io::fmt(b.T())
            << ", W = " << prolate::io::fmt(b.W()) << ", N = " << b.count << "\n";
        log << "# n        gamma_n                  1-gamma_n\n";
        for (int n = 0; n < b.count; ++n) {
            char line[96];
            std::snprintf(line, sizeof line, "%4d  %-24.17g %-24.17g\n", n, b.gamma[n],
                          b.one_minus_gamma[n]);
            log << line;
        }
        return exit_ok;
    } catch (const prolate::validation_error& e) {
        log << "basis: " << e.what() << "\n";
        return exit_validation;
    } catch (const prolate::consistency_error& e) {
        log << "basis: " << e.what() << "\n";
        return exit_consistency;
    } catch (const prolate::error& e) {
        log << "basis: " << e.what() << "\n";
        return exit_io;
    }
}

struct VerifyArgs {
    std::string basis_path;
    std::string suite; // bounds | orthogonality | sampling | gep | signature
    unsigned long seed = 1;
    int trials = 500;
    std::string out; // report path (JSON lines); empty = stdout only
};

namespace detail {

struct Reporter {
    std::ostringstream lines;
    int violations = 0;

    void check(const std::string& name, double value, double bound, bool ok) {
        prolate::io::JsonWriter w;
        w.begin_object();
        w.key("check");
        w.string(name);
        w.key("value");
        w.number(value);
        w.key("bound");
        w.number(bound);
        w.key("ok");
        w.boolean(ok);
        w.end_object();
        lines << w.str() << "\n";
        if (!ok) ++violations;
    }
    void note(const std::string& name, double value) {
        prolate::io::JsonWriter w;
        w.begin_object();
        w.key("check");
        w.string(name);
        w.key("value");
        w.number(value);
        w.key("ok");
        w.boolean(true);
        w.end_object();
        lines << w.str() << "\n";
    }
};

inline void suite_bounds(const prolate::PswfBasis& b, Reporter& rep) {
    const int n_hi = std::min(b.count - 1, int(std::ceil(b.spec.c_tilde)) + 2);
    for (int n = 0; n <= n_hi; ++n) {
        const prolate::BoundReport r = prolate::bound_report(b, n);
        const double omg = b.one_minus_gamma[n], g = b.gamma[n];
        rep.check("sup_out<= (1-gamma) C_extra n=" + std::to_string(n), r.sup_out_numeric,
                  omg * r.c_extra, r.sup_out_numeric <= omg * r.c_extra * (1 + 1e-9));
        rep.check("sup_in <= gamma C_intra~ n=" + std::to_string(n), r.sup_in_numeric,
                  g * r.c_intra_tilde, r.sup_in_numeric <= g * r.c_intra_tilde * (1 + 1e-9));
        const double intra_id = g * r.c_intra * r.c_intra;
        rep.check("deriv intra split n=" + std::to_string(n), r.deriv_T_sq, intra_id,
                  std::abs(r.deriv_T_sq - intra_id) <= 1e-7 * std::max(1e-300, intra_id));
        const double extra_id = omg * r.c_extra * r.c_extra;
        rep.check("deriv extra split n=" + std::to_string(n), r.deriv_out_sq, extra_id,
                  std::abs(r.deriv_out_sq - extra_id) <= 1e-7 * std::max(1e-300, extra_id));
        const prolate::EdgeBounds e = prolate::edge_bounds(b, n);
        rep.check("edge extra n=" + std::to_string(n), r.xi_T_sq, e.extra_bound,
                  r.xi_T_sq <= e.extra_bound * (1 + 1e-9));
        if (e.intra_applicable)
            rep.check("edge intra n=" + std::to_string(n), r.xi_T_sq, e.intra_bound,
                      r.xi_T_sq <= e.intra_bound * (1 + 1e-9));
    }
}

inline void suite_orthogonality(const prolate::PswfBasis& b, Reporter& rep) {
    const double T = b.T();
    const int n_hi = std::min(b.count - 1, int(std::ceil(b.spec.c_tilde)) + 2);
    double worst_window = 0.0;
    for (int n = 0; n <= n_hi; ++n)
        for (int m = n; m <= n_hi; ++m) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < b.zq.size(); ++i)
                acc += T * b.zw[i] * (b.scale[n] * b.S_q(i, n)) * (b.scale[m] * b.S_q(i, m));
            const double target = (n == m) ? b.gamma[n] : 0.0;
            worst_window = std::max(worst_window, std::abs(acc - target));
        }
    rep.check("window Gram deviation", worst_window, 1e-9, worst_window < 1e-9);
    const prolate::DiscreteOrthogonalityResult d = prolate::discrete_orthogonality_residual(b, 40);
    const double tol_kl = std::max(1e-9, 10.0 * d.tail_estimate_n_sum);
    const double tol_nm = std::max(1e-9, 10.0 * d.tail_estimate_k_sum);
    rep.check("discrete node-pair residual", d.res_kl, tol_kl, d.res_kl <= tol_kl);
    rep.check("discrete index-pair residual", d.res_nm, tol_nm, d.res_nm <= tol_nm);
    for (int n = 0; n <= n_hi; ++n) {
        const double r = prolate::residual_integral_eigenrelation(
            b, n, {0.0, 0.3 * T, 0.9 * T, 1.4 * T, 2.0 * T});
        rep.check("eigenrelation residual n=" + std::to_string(n), r, 1e-8, r < 1e-8);
    }
}

inline void suite_sampling(const prolate::PswfBasis& b, Reporter& rep, unsigned long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double T = b.T(), W = b.W();
    const int N = std::max(1, int(std::floor(b.spec.c_tilde)) - 2);
    Eigen::VectorXd a(N);
    for (int n = 0; n < N; ++n) a[n] = gauss(rng);
    a /= a.norm();
    auto f = [&](double t) {
        double s = 0.0;
        for (int n = 0; n < N; ++n) s += a[n] * prolate::eval_xi(b, n, t);
        return std::complex<double>(s, 0.0);
    };
    const int kmax = int(std::ceil(5.0 * T * W / prolate::pi));
    const prolate::SampleGrid grid = prolate::make_sample_grid(W, -kmax, kmax, f);
    const double at_node = std::abs(prolate::shannon_interpolate(grid, grid.node(1)) -
                                    grid.value(1));
    rep.check("shannon node identity", at_node, 0.0, at_node == 0.0);
    // truncated prolate reconstruction error vs the span bound
    const prolate::QuadRule q = prolate::gauss_legendre(400).mapped_to(-T, T);
    double err2 = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const std::complex<double> d =
            f(q.nodes[i]) - prolate::prolate_sampling_truncated(b, grid, N + 1, q.nodes[i]);
        err2 += q.weights[i] * std::norm(d);
    }
    const double bound = prolate::span_truncation_bound(b, N, 1.0);
    rep.check("prolate sampling truncation", err2, bound, err2 <= bound);
}

inline void suite_gep(Reporter& rep, unsigned long seed, int trials) {
    using namespace prolate::trials;
    std::mt19937_64 rng(seed);
    struct Fam {
        const char* name;
        std::function<TrialResult(std::mt19937_64&)> run;
    };
    const std::vector<Fam> fams = {{"stability", trial_stability},
                                   {"user_friendly", trial_user_friendly},
                                   {"weyl", trial_weyl},
                                   {"integrated", trial_integrated},
                                   {"detection", trial_detection},
                                   {"monotonicity", trial_monotonicity}};
    for (const auto& fam : fams) {
        int bad = 0;
        double worst = 0.0;
        for (int t = 0; t < trials; ++t) {
            const TrialResult r = fam.run(rng);
            if (!r.ok) ++bad;
            worst = std::max(worst, r.worst);
        }
        rep.check(std::string("trials ") + fam.name + " violations", bad, 0, bad == 0);
        rep.note(std::string("trials ") + fam.name + " worst", worst);
    }
}

inline void suite_signature(const prolate::PswfBasis& b, Reporter& rep) {
    const prolate::TransitionSignature s = prolate::transition_signature(b);
    rep.note("transition index", s.index);
    rep.note("lambda below", s.lambda_below);
    rep.note("lambda above", s.lambda_above);
    rep.note(s.degenerate ? "signature degenerate (c_tilde < 1)"
                          : (s.holds ? "signature holds" : "signature violated"),
             s.holds ? 1.0 : 0.0);
}

} // namespace detail

inline int cmd_verify(const VerifyArgs& a, std::ostream& log) {
    try {
        detail::Reporter rep;
        if (a.suite == "gep") {
            detail::suite_gep(rep, a.seed, a.trials);
        } else {
            const prolate::PswfBasis b =
                prolate::io::basis_from_json(prolate::io::read_file(a.basis_path));
            if (a.suite == "bounds")
                detail::suite_bounds(b, rep);
            else if (a.suite == "orthogonality")
                detail::suite_orthogonality(b, rep);
            else if (a.suite == "sampling")
                detail::suite_sampling(b, rep, a.seed);
            else if (a.suite == "signature")
                detail::suite_signature(b, rep);
            else {
                log << "verify: unknown suite '" << a.suite << "'\n";
                return exit_validation;
            }
        }
        if (!a.out.empty()) prolate::io::write_file(a.out, rep.lines.str());
        log << rep.lines.str();
        if (rep.violations > 0 && a.suite != "signature") {
            log << "verify: " << rep.violations << " violation(s)\n";
            return exit_consistency;
        }
        return exit_ok;
    } catch (const prolate::validation_error& e) {
        log << "verify: " << e.what() << "\n";
        return exit_validation;
    } catch (const prolate::dimension_error& e) {
        log << "verify: " << e.what() << "\n";
        return exit_validation;
    } catch (const prolate::consistency_error& e) {
        log << "verify: " << e.what() << "\n";
        return exit_consistency;
    } catch (const prolate::error& e) {
        log << "verify: " << e.what() << "\n";
        return exit_io;
    }
}

struct SynthArgs {
    std::string model_path;
    double T = 1.0;
    double dt = 0.0;
    std::string out;
};

inline int cmd_synth(const SynthArgs& a, std::ostream& log) {
    if (!(a.dt > 0.0)) {
        log << "synth: dt must be positive\n";
        return exit_validation;
    }
    try {
        const prolate::DiscreteSignal model =
            prolate::io::model_from_json(prolate::io::read_file(a.model_path));
        const prolate::SampledSignal s = prolate::sample_signal(model, a.T, a.dt);
        prolate::io::write_file(a.out, prolate::io::signal_to_csv(s));
        return exit_ok;
    } catch (const prolate::validation_error& e) {
        log << "synth: " << e.what() << "\n";
        return exit_validation;
    } catch (const prolate::error& e) {
        log << "synth: " << e.what() << "\n";
        return exit_io;
    }
}

struct InterpArgs {
    std::string grid_path;
    double W = 0.0;
    double from = 0.0, to = 0.0, step = 0.0;
    std::string out;
};

/// Whittaker-Shannon interpolation of a Nyquist-sampled grid CSV (columns
/// k, re, im) onto a uniform output grid, written as a signal CSV.
inline int cmd_interp(const InterpArgs& a, std::ostream& log) {
    if (!(a.W > 0.0) || !(a.step > 0.0) || !(a.to >= a.from)) {
        log << "interp: need --W > 0, --step > 0 and --to >= --from\n";
        return exit_validation;
    }
    try {
        const prolate::SampleGrid grid =
            prolate::io::grid_from_csv(prolate::io::read_file(a.grid_path), a.W);
        prolate::SampledSignal out;
        const int n = static_cast<int>(std::floor((a.to - a.from) / a.step)) + 1;
        out.times.resize(n);
        out.values.resize(n);
        for (int i = 0; i < n; ++i) {
            out.times[i] = a.from + i * a.step;
            out.values[i] = prolate::shannon_interpolate(grid, out.times[i]);
        }
        prolate::io::write_file(a.out, prolate::io::signal_to_csv(out));
        return exit_ok;
    } catch (const prolate::validation_error& e) {
        log << "interp: " << e.what() << "\n";
        return exit_validation;
    } catch (const prolate::error& e) {
        log << "interp: " << e.what() << "\n";
        return exit_io;
    }
}

struct AnalyzeArgs {
    std::string signal_path;
    std::string plan_path;
    std::string out;
};

inline int cmd_analyze(const AnalyzeArgs& a, std::ostream& log) {
    try {
        const prolate::io::BandPlan plan =
            prolate::io::plan_from_json(prolate::io::read_file(a.plan_path));
        const prolate::SampledSignal signal =
            prolate::io::signal_from_csv(prolate::io::read_file(a.signal_path));
        if (!signal.covers(-2.0 * plan.T, 2.0 * plan.T)) {
            log << "analyze: signal must cover [-2T, 2T] = [" << -2.0 * plan.T << ", "
                << 2.0 * plan.T << "], have [" << signal.times[0] << ", "
                << signal.times[signal.times.size() - 1] << "]\n";
            return exit_validation;
        }
        auto basis = std::make_shared<const prolate::PswfBasis>(prolate::build_basis(
            prolate::BandTimeSpec(plan.T, plan.half_width), plan.N, plan.quad_order));
        const auto [c0_sample, interpolated] = signal.c_at_zero();
        if (interpolated) log << "analyze: note: no sample at t = 0; C(0) interpolated\n";
        const double c0 = std::abs(c0_sample);
        std::mutex herm_mutex;
        double worst_herm = 0.0;
        const auto results = prolate::band_sweep(
            [&](const prolate::FilterSystem& f) {
                double herm = 0.0;
                prolate::Gep gep = prolate::assemble_gep_time(signal, f, -1, &herm);
                std::lock_guard<std::mutex> lock(herm_mutex);
                worst_herm = std::max(worst_herm, herm);
                return gep;
            },
            plan.bands, basis, plan.M, c0);
        if (worst_herm > 1e-6)
            log << "analyze: warning: hermiticity residual " << worst_herm
                << " above 1e-6; the samples look inconsistent with an autocorrelation\n";
        prolate::io::write_file(a.out, prolate::io::results_to_json(results));
        return exit_ok;
    } catch (const prolate::increase_m_error& e) {
        log << "analyze: " << e.what() << "\n";
        return exit_consistency;
    } catch (const prolate::validation_error& e) {
        log << "analyze: " << e.what() << "\n";
        return exit_validation;
    } catch (const prolate::dimension_error& e) {
        log << "analyze: " << e.what() << "\n";
        return exit_validation;
    } catch (const prolate::consistency_error& e) {
        log << "analyze: " << e.what() << "\n";
        return exit_consistency;
    } catch (const prolate::error& e) {
        log << "analyze: " << e.what() << "\n";
        return exit_io;
    }
}

} // namespace prolate_cli

#endif
