#include "descentlab/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "descentlab/fourier.hpp"
#include "descentlab/gaussian.hpp"
#include "descentlab/harness.hpp"
#include "descentlab/verify.hpp"

namespace descentlab {

namespace {

using harness::ExperimentConfig;
using harness::Model;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string show(const RiskValue& r) { return r.is_divergent() ? std::string("inf") : fmt12(r.value()); }

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv(kSeedEnvVar);
    if (s == nullptr || *s == '\0') return std::nullopt;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used, 0);
        if (used != std::string(s).size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string(kSeedEnvVar) + " is not an unsigned integer: '" + s + "'");
    }
}

// Flags shared by the curve subcommands; values only count when given.
struct CurveFlags {
    std::size_t D = 0, n = 0, p_min = 0, p_max = 0, p_step = 1, trials = 0;
    double sigma = 0.0, beta_norm_sq = 1.0;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out, svg, config;
    bool full_scale = false;

    CLI::Option *o_D = nullptr, *o_n = nullptr, *o_sigma = nullptr, *o_beta = nullptr, *o_pmin = nullptr,
                *o_pmax = nullptr, *o_pstep = nullptr, *o_trials = nullptr, *o_seed = nullptr, *o_out = nullptr,
                *o_svg = nullptr, *o_threads = nullptr, *o_config = nullptr;
};

void add_curve_flags(CLI::App* sub, CurveFlags& f, Model model) {
    if (model != Model::GaussianPrescient) f.o_D = sub->add_option("--D", f.D, "Feature dimension D");
    f.o_n = sub->add_option("--n", f.n, "Sample size n");
    if (model == Model::GaussianRandomT) {
        f.o_sigma = sub->add_option("--sigma", f.sigma, "Noise standard deviation");
        f.o_beta = sub->add_option("--beta-norm-sq", f.beta_norm_sq, "Squared norm of beta");
    }
    f.o_pmin = sub->add_option("--p-min", f.p_min, "Smallest p in the sweep");
    f.o_pmax = sub->add_option("--p-max", f.p_max, "Largest p in the sweep");
    f.o_pstep = sub->add_option("--p-step", f.p_step, "Sweep step")->check(CLI::PositiveNumber);
    if (model != Model::GaussianPrescient) {
        f.o_trials = sub->add_option("--trials", f.trials,
                                     model == Model::GaussianRandomT ? "Monte Carlo trials per p (0 = theory only)"
                                                                      : "(S, T) repeats per p");
        f.o_threads = sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
    }
    f.o_seed = sub->add_option("--seed", f.seed, "Master seed (overrides DESCENTLAB_SEED)");
    f.o_out = sub->add_option("--out", f.out, "Output CSV path (stdout when omitted)");
    f.o_svg = sub->add_option("--svg", f.svg, "Also render a log-scale SVG line chart");
    f.o_config = sub->add_option("--config", f.config, "JSON file with experiment settings");
    if (model == Model::FourierFlat || model == Model::FourierDecay)
        sub->add_flag("--full-scale", f.full_scale, "Use D = 1024, n = 256 (default p step 8)");
}

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

ExperimentConfig build_config(const CurveFlags& f, Model model) {
    ExperimentConfig c;
    c.model = model;
    std::size_t default_step = 1;
    switch (model) {
        case Model::GaussianRandomT: c.D = 100, c.n = 40, c.trials = 2000; break;
        case Model::GaussianPrescient: c.D = 0, c.n = 40, c.trials = 0; break;
        case Model::FourierFlat:
        case Model::FourierDecay:
            c.D = f.full_scale ? 1024 : 256;
            c.n = f.full_scale ? 256 : 64;
            c.trials = 10;
            default_step = f.full_scale ? 8 : 1;
            break;
    }
    if (const auto s = env_seed()) c.master_seed = *s;
    if (!f.config.empty()) {
        harness::load_config(f.config, c);
        if (c.model != model)
            throw UsageError(std::string("config model '") + harness::model_name(c.model) +
                             "' does not match this subcommand");
    }

    if (given(f.o_D)) c.D = f.D;
    if (given(f.o_n)) c.n = f.n;
    if (given(f.o_sigma)) c.sigma = f.sigma;
    if (given(f.o_beta)) c.beta_norm_sq = f.beta_norm_sq;
    if (given(f.o_trials)) c.trials = f.trials;
    if (given(f.o_seed)) c.master_seed = f.seed;
    if (given(f.o_out)) c.output_path = f.out;
    if (given(f.o_svg)) c.svg_path = f.svg;
    if (given(f.o_threads)) c.threads = f.threads;

    const bool grid_flags = given(f.o_pmin) || given(f.o_pmax) || given(f.o_pstep);
    if (c.p_grid.empty() || grid_flags) {
        std::size_t lo = 0, hi = c.D;
        if (model == Model::FourierFlat) lo = c.n;
        if (model == Model::GaussianPrescient) hi = 2000;
        if (given(f.o_pmin)) lo = f.p_min;
        if (given(f.o_pmax)) hi = f.p_max;
        const std::size_t step = given(f.o_pstep) ? f.p_step : default_step;
        c.p_grid = harness::make_grid(lo, hi, step);
        // Keep the right endpoint on coarse grids.
        if (!given(f.o_pmax) && !c.p_grid.empty() && c.p_grid.back() != hi && lo <= hi) c.p_grid.push_back(hi);
    }
    return c;
}

int run_curve(const CurveFlags& f, Model model, std::ostream& out) {
    const ExperimentConfig c = build_config(f, model);
    const harness::RiskCurve curve = harness::run_experiment(c);
    if (c.output_path.empty())
        out << harness::format_csv(curve);
    else
        out << "wrote " << curve.points.size() << " rows to " << c.output_path << '\n';
    return 0;
}

struct TheoryFlags {
    std::string model;
    std::size_t D = 0, n = 0, p = 0;
    double beta_norm_sq = 1.0, in_norm_sq = 0.0, out_norm_sq = 0.0, sigma = 0.0, rho_n = 0.0, rho_p = 0.0;
    CLI::Option *o_D = nullptr, *o_n = nullptr, *o_p = nullptr, *o_rho_n = nullptr, *o_rho_p = nullptr;
};

int run_theory(const TheoryFlags& f, std::ostream& out) {
    auto need = [](const CLI::Option* o, const char* name) {
        if (!given(o)) throw UsageError(std::string("theory: ") + name + " is required for this model");
    };
    if (f.model == "asymptotic-fourier") {
        need(f.o_rho_n, "--rho-n");
        need(f.o_rho_p, "--rho-p");
        out << fmt12(fourier::asymptotic_risk(f.rho_n, f.rho_p)) << '\n';
        return 0;
    }
    need(f.o_n, "--n");
    need(f.o_p, "--p");
    if (f.model == "gaussian") {
        need(f.o_D, "--D");
        out << show(harness::random_selection_theory(f.beta_norm_sq, f.sigma, f.D, f.n, f.p)) << '\n';
    } else if (f.model == "theorem1") {
        out << show(gaussian::theorem1_risk({f.in_norm_sq, f.out_norm_sq}, f.n, f.p)) << '\n';
    } else if (f.model == "theorem2") {
        out << show(gaussian::theorem2_risk({f.in_norm_sq, f.out_norm_sq}, f.sigma, f.n, f.p)) << '\n';
    } else if (f.model == "prescient") {
        out << show(gaussian::prescient_risk(f.p, f.n)) << '\n';
    } else {
        throw UsageError("theory: unknown model '" + f.model + "'");
    }
    return 0;
}

struct VerifyFlags {
    std::size_t trials = 5000, pairs = 50, draws = 10000;
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
    CLI::Option* o_seed = nullptr;
};

int run_verify(const VerifyFlags& f, std::ostream& out) {
    std::uint64_t seed = kDefaultSeed;
    if (const auto s = env_seed()) seed = *s;
    if (given(f.o_seed)) seed = f.seed;

    bool all = true;
    for (double sigma : {0.0, 0.5}) {
        const auto checks = verify::gaussian_theorem_suite(30, 12, sigma, f.trials, 10, 14, seed, f.threads);
        std::size_t ok = 0;
        for (const auto& c : checks) {
            ok += c.passed;
            if (!c.passed)
                out << "  p=" << c.p << " theory=" << show(c.theory) << " mc=" << fmt12(c.mc.mean) << " +- "
                    << fmt12(c.mc.std_error) << '\n';
        }
        const bool pass = ok == checks.size();
        all = all && pass;
        out << (pass ? "PASS" : "FAIL") << "  gaussian D=30 n=12 sigma=" << sigma << ": " << ok << "/" << checks.size()
            << " points within 3 stderr\n";
    }
    const auto pairs = verify::fourier_eigen_suite(16, 4, f.pairs, f.draws, seed, f.threads);
    std::size_t ok = 0;
    for (const auto& c : pairs) {
        ok += c.passed;
        if (!c.passed)
            out << "  |T|=" << c.T.size() << " theory=" << show(c.theory) << " mc=" << fmt12(c.mc.mean) << " +- "
                << fmt12(c.mc.std_error) << '\n';
    }
    const bool pass = ok == pairs.size();
    all = all && pass;
    out << (pass ? "PASS" : "FAIL") << "  fourier D=16 n=4: " << ok << "/" << pairs.size()
        << " (S,T) pairs within 3 stderr\n";
    return all ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Double-descent risk curves for min-norm least squares", "descentlab"};
    app.require_subcommand(1);

    CurveFlags gauss, presc, four, appx;
    struct Sub {
        CLI::App* app;
        CurveFlags* flags;
        Model model;
    };
    const std::vector<Sub> curves = {
        {app.add_subcommand("gaussian-curve", "Gaussian model, uniformly random feature subsets"), &gauss,
         Model::GaussianRandomT},
        {app.add_subcommand("prescient-curve", "Gaussian model, features in decreasing order of beta_j^2"), &presc,
         Model::GaussianPrescient},
        {app.add_subcommand("fourier-curve", "Fourier model, random rows and columns of the DFT"), &four,
         Model::FourierFlat},
        {app.add_subcommand("appendix-curve", "Fourier model with t_i^2 ~ i^-2 and T = {1..p}"), &appx,
         Model::FourierDecay},
    };
    for (const Sub& s : curves) add_curve_flags(s.app, *s.flags, s.model);

    TheoryFlags th;
    CLI::App* theory = app.add_subcommand("theory", "Evaluate one closed-form risk");
    theory->add_option("--model", th.model, "gaussian | theorem1 | theorem2 | prescient | asymptotic-fourier")
        ->required();
    th.o_D = theory->add_option("--D", th.D);
    th.o_n = theory->add_option("--n", th.n);
    th.o_p = theory->add_option("--p", th.p);
    theory->add_option("--beta-norm-sq", th.beta_norm_sq);
    theory->add_option("--in-norm-sq", th.in_norm_sq);
    theory->add_option("--out-norm-sq", th.out_norm_sq);
    theory->add_option("--sigma", th.sigma);
    th.o_rho_n = theory->add_option("--rho-n", th.rho_n);
    th.o_rho_p = theory->add_option("--rho-p", th.rho_p);

    VerifyFlags vf;
    CLI::App* verify = app.add_subcommand("verify", "Run the theory-versus-simulation suites");
    verify->add_option("--trials", vf.trials, "Gaussian trials per p");
    verify->add_option("--pairs", vf.pairs, "Fourier (S, T) pairs");
    verify->add_option("--draws", vf.draws, "beta draws per Fourier pair");
    vf.o_seed = verify->add_option("--seed", vf.seed, "Master seed");
    verify->add_option("--threads", vf.threads, "Worker threads (0 = all cores)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        for (const Sub& s : curves)
            if (s.app->parsed()) return run_curve(*s.flags, s.model, out);
        if (theory->parsed()) return run_theory(th, out);
        if (verify->parsed()) return run_verify(vf, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace descentlab
