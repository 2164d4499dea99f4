#include "descentlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "descentlab/fourier.hpp"
#include "descentlab/gaussian.hpp"
#include "descentlab/parallel.hpp"

namespace descentlab::harness {

namespace {

// Stream path tags; trials and repeats use paths of other shapes.
constexpr std::uint64_t kBetaTag = 0xBE7A;

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

McEstimate aggregate(const std::vector<double>& losses, bool unstable) {
    return unstable ? trimmed_summary(losses, kUnstableTrim) : summarize(losses);
}

void set_mc(RiskPoint& pt, const McEstimate& est) {
    pt.mc_mean = est.mean;
    pt.mc_stderr = est.std_error;
}

Eigen::VectorXd gaussian_beta(const ExperimentConfig& c) {
    Rng rng = make_stream(c.master_seed, {kBetaTag, c.D, kBetaTag});
    return unit_sphere(static_cast<Eigen::Index>(c.D), rng) * std::sqrt(c.beta_norm_sq);
}

void run_gaussian_random(const ExperimentConfig& c, RiskCurve& curve) {
    gaussian::GaussianSpec spec{c.D, c.n, c.sigma, gaussian_beta(c)};
    spec.validate();
    parallel_for(curve.points.size(), c.threads, [&](std::size_t i) {
        RiskPoint& pt = curve.points[i];
        pt.theory = random_selection_theory(c.beta_norm_sq, c.sigma, c.D, c.n, pt.p);
        if (c.trials == 0) return;
        std::vector<double> losses(c.trials);
        for (std::size_t t = 0; t < c.trials; ++t) {
            Rng rng = make_stream(c.master_seed, {pt.p, t});
            const auto T = gaussian::FeatureSet::random(pt.p, c.D, rng);
            losses[t] = gaussian::trial_loss(spec, T, rng);
        }
        pt.unstable = in_instability_band(pt.p, c.n);
        set_mc(pt, aggregate(losses, pt.unstable));
    });
}

void run_prescient(const ExperimentConfig& c, RiskCurve& curve) {
    for (RiskPoint& pt : curve.points) pt.theory = gaussian::prescient_risk(pt.p, c.n);
}

void run_fourier(const ExperimentConfig& c, RiskCurve& curve, fourier::Spectrum spectrum) {
    const fourier::FourierSpec spec{c.D, c.n, fourier::BetaModel::UnitSphereReal, spectrum};
    spec.validate();
    const fourier::DftMatrix F(c.D);
    Rng beta_rng = make_stream(c.master_seed, {kBetaTag, c.D, kBetaTag});
    const Eigen::VectorXcd beta = fourier::draw_beta(spec.beta_model, c.D, beta_rng);

    parallel_for(curve.points.size(), c.threads, [&](std::size_t i) {
        RiskPoint& pt = curve.points[i];
        if (c.trials == 0) return;
        if (spectrum == fourier::Spectrum::Flat)
            pt.theory = fourier::averaged_conditional_risk(F, spec, pt.p, c.trials, c.master_seed, 1);
        const std::vector<double> losses = fourier::repeat_losses(F, spec, pt.p, c.trials, c.master_seed, beta, 1);
        pt.unstable = in_instability_band(pt.p, c.n);
        set_mc(pt, aggregate(losses, pt.unstable));
    });
}

}  // namespace

const char* model_name(Model m) {
    switch (m) {
        case Model::GaussianRandomT: return "gaussian";
        case Model::GaussianPrescient: return "prescient";
        case Model::FourierFlat: return "fourier";
        case Model::FourierDecay: return "appendix";
    }
    return "?";
}

Model parse_model(const std::string& name) {
    for (Model m : {Model::GaussianRandomT, Model::GaussianPrescient, Model::FourierFlat, Model::FourierDecay})
        if (name == model_name(m)) return m;
    throw std::invalid_argument("unknown model '" + name + "'");
}

void ExperimentConfig::validate() const {
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("config: sigma must be >= 0");
    if (!(beta_norm_sq >= 0.0)) throw std::invalid_argument("config: beta_norm_sq must be >= 0");
    if (model != Model::GaussianPrescient) {
        if (D < 1) throw std::invalid_argument("config: D must be >= 1");
        for (std::size_t p : p_grid)
            if (p > D) throw std::invalid_argument("config: p = " + std::to_string(p) + " exceeds D");
    }
    if (model == Model::FourierFlat || model == Model::FourierDecay) {
        if (n > D) throw std::invalid_argument("config: n must not exceed D");
        if (sigma != 0.0) throw std::invalid_argument("config: the Fourier models are noise-free");
    }
    if (model == Model::FourierFlat)
        for (std::size_t p : p_grid)
            if (p < n) throw std::invalid_argument("config: the flat Fourier model requires p >= n");
    if (!std::is_sorted(p_grid.begin(), p_grid.end()) ||
        std::adjacent_find(p_grid.begin(), p_grid.end()) != p_grid.end())
        throw std::invalid_argument("config: p grid must be strictly increasing");
}

RiskValue random_selection_theory(double beta_norm_sq, double sigma, std::size_t D, std::size_t n, std::size_t p) {
    if (sigma == 0.0) return gaussian::random_selection_risk(beta_norm_sq, D, n, p);
    if (p > D) throw std::invalid_argument("random_selection_theory: p exceeds D");
    const double frac = static_cast<double>(p) / static_cast<double>(D);
    return gaussian::theorem2_risk({frac * beta_norm_sq, (1.0 - frac) * beta_norm_sq}, sigma, n, p);
}

bool in_instability_band(std::size_t p, std::size_t n) {
    return p + kInstabilityHalfWidth >= n && p <= n + kInstabilityHalfWidth;
}

std::vector<std::size_t> make_grid(std::size_t lo, std::size_t hi, std::size_t step) {
    if (step == 0) throw std::invalid_argument("grid: step must be >= 1");
    if (lo > hi) throw std::invalid_argument("grid: p-min exceeds p-max");
    std::vector<std::size_t> grid;
    for (std::size_t p = lo; p <= hi; p += step) grid.push_back(p);
    return grid;
}

RiskCurve run_experiment(const ExperimentConfig& config) {
    config.validate();
    RiskCurve curve;
    curve.points.resize(config.p_grid.size());
    for (std::size_t i = 0; i < config.p_grid.size(); ++i) curve.points[i].p = config.p_grid[i];

    switch (config.model) {
        case Model::GaussianRandomT: run_gaussian_random(config, curve); break;
        case Model::GaussianPrescient: run_prescient(config, curve); break;
        case Model::FourierFlat: run_fourier(config, curve, fourier::Spectrum::Flat); break;
        case Model::FourierDecay: run_fourier(config, curve, fourier::Spectrum::DecayInvSquare); break;
    }

    if (!config.output_path.empty()) write_csv(curve, config.output_path);
    if (!config.svg_path.empty()) write_svg(curve, config.svg_path, model_name(config.model));
    return curve;
}

std::string format_csv(const RiskCurve& curve) {
    std::vector<const RiskPoint*> rows;
    for (const RiskPoint& pt : curve.points) rows.push_back(&pt);
    std::stable_sort(rows.begin(), rows.end(), [](const RiskPoint* a, const RiskPoint* b) { return a->p < b->p; });

    std::string out = "p,theory,mc_mean,mc_stderr,unstable\n";
    for (const RiskPoint* pt : rows) {
        out += std::to_string(pt->p);
        out += ',';
        if (pt->theory) out += pt->theory->is_divergent() ? std::string("inf") : fmt12(pt->theory->value());
        out += ',';
        if (pt->mc_mean) out += fmt12(*pt->mc_mean);
        out += ',';
        if (pt->mc_stderr) out += fmt12(*pt->mc_stderr);
        out += ',';
        out += pt->unstable ? '1' : '0';
        out += '\n';
    }
    return out;
}

void write_csv(const RiskCurve& curve, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << format_csv(curve);
    if (!f) throw std::runtime_error("write to '" + path.string() + "' failed");
}

namespace {

std::string xml_escape(const std::string& text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const RiskCurve& curve, const std::string& title) {
    constexpr double W = 640, H = 400, L = 60, R = 20, Tm = 30, B = 40;
    std::vector<std::pair<double, double>> theory, mc;
    for (const RiskPoint& pt : curve.points) {
        if (pt.theory && !pt.theory->is_divergent() && pt.theory->value() > 0)
            theory.emplace_back(static_cast<double>(pt.p), pt.theory->value());
        if (pt.mc_mean && *pt.mc_mean > 0) mc.emplace_back(static_cast<double>(pt.p), *pt.mc_mean);
    }
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto* series : {&theory, &mc})
        for (auto [x, y] : *series) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, std::log10(y));
            ymax = std::max(ymax, std::log10(y));
        }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    ymin = std::floor(ymin);
    ymax = std::max(std::ceil(ymax), ymin + 1);

    auto sx = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto sy = [&](double y) { return Tm + (ymax - std::log10(y)) / (ymax - ymin) * (H - Tm - B); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << Tm << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
        const double y = sy(std::pow(10.0, e));
        s << "<text x=\"" << L - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" font-size=\"10\">1e" << e << "</text>\n";
    }
    s << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\" font-size=\"10\">" << xmin << "</text>\n";
    s << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\" font-size=\"10\">" << xmax
      << "</text>\n";
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\" font-size=\"12\">p</text>\n";

    auto polyline = [&](const std::vector<std::pair<double, double>>& pts, const char* color) {
        if (pts.empty()) return;
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : pts) s << sx(x) << ',' << sy(y) << ' ';
        s << "\"/>\n";
    };
    polyline(theory, "steelblue");
    polyline(mc, "firebrick");
    s << "</svg>\n";
    return s.str();
}

void write_svg(const RiskCurve& curve, const std::filesystem::path& path, const std::string& title) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    f << render_svg(curve, title);
}

void load_config(const std::filesystem::path& path, ExperimentConfig& config) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config '" + path.string() + "': " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config '" + path.string() + "': expected a JSON object");

    static const std::vector<std::string> known = {"model", "D",      "n",      "sigma", "beta_norm_sq",
                                                   "p_grid", "p_min", "p_max", "p_step", "trials",
                                                   "seed",   "out",   "svg",   "threads"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::runtime_error("config: unknown key '" + key + "'");

    try {
        if (j.contains("model")) config.model = parse_model(j["model"].get<std::string>());
        if (j.contains("D")) config.D = j["D"].get<std::size_t>();
        if (j.contains("n")) config.n = j["n"].get<std::size_t>();
        if (j.contains("sigma")) config.sigma = j["sigma"].get<double>();
        if (j.contains("beta_norm_sq")) config.beta_norm_sq = j["beta_norm_sq"].get<double>();
        if (j.contains("trials")) config.trials = j["trials"].get<std::size_t>();
        if (j.contains("seed")) config.master_seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) config.output_path = j["out"].get<std::string>();
        if (j.contains("svg")) config.svg_path = j["svg"].get<std::string>();
        if (j.contains("threads")) config.threads = j["threads"].get<unsigned>();
        if (j.contains("p_grid")) {
            config.p_grid = j["p_grid"].get<std::vector<std::size_t>>();
        } else if (j.contains("p_min") || j.contains("p_max") || j.contains("p_step")) {
            config.p_grid = make_grid(j.value("p_min", std::size_t{0}), j.value("p_max", config.D),
                                      j.value("p_step", std::size_t{1}));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config '" + path.string() + "': " + e.what());
    }
}

}  // namespace descentlab::harness
