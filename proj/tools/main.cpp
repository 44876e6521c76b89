// prolate-fd: build prolate bases, verify their analytic properties, and run
// prolate filter diagonalization on sampled signals.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"prolate spheroidal wave functions and prolate filter diagonalization"};
    app.require_subcommand(1);

    prolate_cli::BasisArgs basis;
    auto* cb = app.add_subcommand("basis", "build a prolate basis and write it as JSON");
    double c_opt = 0, T_opt = 0, W_opt = 0;
    auto* oc = cb->add_option("--c", c_opt, "band-time product W*T");
    auto* ot = cb->add_option("--T", T_opt, "half time-window");
    auto* ow = cb->add_option("--W", W_opt, "half bandwidth");
    cb->add_option("--n", basis.N, "number of prolates")->default_val(8);
    cb->add_option("--quad-order", basis.quad_order, "quadrature order per half-interval")
        ->default_val(200);
    cb->add_option("--out", basis.out, "output JSON path")->required();

    prolate_cli::VerifyArgs verify;
    auto* cv = app.add_subcommand("verify", "run a verification suite");
    cv->add_option("basis", verify.basis_path, "basis JSON path (unused by the gep suite)");
    cv->add_option("--suite", verify.suite, "bounds|orthogonality|sampling|gep|signature")
        ->required();
    cv->add_option("--seed", verify.seed, "random seed")->default_val(1);
    cv->add_option("--trials", verify.trials, "trial count for randomized suites")
        ->default_val(500);
    cv->add_option("--out", verify.out, "report path (JSON lines)");

    prolate_cli::SynthArgs synth;
    auto* cs = app.add_subcommand("synth", "synthesize a tone model to CSV samples");
    cs->add_option("model", synth.model_path, "model JSON path")->required();
    cs->add_option("--T", synth.T, "half time-window (samples cover [-2T, 2T])")->required();
    cs->add_option("--dt", synth.dt, "sample spacing")->required();
    cs->add_option("--out", synth.out, "output CSV path")->required();

    prolate_cli::InterpArgs interp;
    auto* ci = app.add_subcommand("interp", "Whittaker-Shannon interpolation of grid samples");
    ci->add_option("grid", interp.grid_path, "grid CSV path (columns k, re, im)")->required();
    ci->add_option("--W", interp.W, "half bandwidth of the grid")->required();
    ci->add_option("--from", interp.from, "first output time")->required();
    ci->add_option("--to", interp.to, "last output time")->required();
    ci->add_option("--step", interp.step, "output spacing")->required();
    ci->add_option("--out", interp.out, "output CSV path")->required();

    prolate_cli::AnalyzeArgs analyze;
    auto* ca = app.add_subcommand("analyze", "run a band sweep over a sampled signal");
    ca->add_option("signal", analyze.signal_path, "signal CSV path")->required();
    ca->add_option("plan", analyze.plan_path, "band plan JSON path")->required();
    ca->add_option("--out", analyze.out, "output JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    if (cb->parsed()) {
        if (oc->count()) basis.c = c_opt;
        if (ot->count()) basis.T = T_opt;
        if (ow->count()) basis.W = W_opt;
        return prolate_cli::cmd_basis(basis, std::cout);
    }
    if (cv->parsed()) return prolate_cli::cmd_verify(verify, std::cout);
    if (cs->parsed()) return prolate_cli::cmd_synth(synth, std::cout);
    if (ci->parsed()) return prolate_cli::cmd_interp(interp, std::cout);
    if (ca->parsed()) return prolate_cli::cmd_analyze(analyze, std::cout);
    return prolate_cli::exit_validation;
}
