#pragma once

// Sweeps over p for each model, pairing the closed-form risk with a Monte
// Carlo estimate, and writes the resulting curve as CSV (and optional SVG).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "descentlab/random.hpp"
#include "descentlab/risk.hpp"

namespace descentlab::harness {

enum class Model { GaussianRandomT, GaussianPrescient, FourierFlat, FourierDecay };

const char* model_name(Model m);
Model parse_model(const std::string& name);

struct ExperimentConfig {
    Model model = Model::GaussianRandomT;
    std::size_t D = 100;
    std::size_t n = 40;
    double sigma = 0.0;
    double beta_norm_sq = 1.0;  // Gaussian random-T model only
    std::vector<std::size_t> p_grid;
    std::size_t trials = 2000;  // Gaussian trials or Fourier (S, T) repeats; 0 = theory only
    std::uint64_t master_seed = kDefaultSeed;
    std::string output_path;
    std::string svg_path;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct RiskPoint {
    std::size_t p = 0;
    std::optional<RiskValue> theory;
    std::optional<double> mc_mean;
    std::optional<double> mc_stderr;
    bool unstable = false;
};

struct RiskCurve {
    std::vector<RiskPoint> points;
};

/// Monte Carlo points with p in [n-2, n+2] are reported as trimmed means and
/// flagged unstable.
inline constexpr std::size_t kInstabilityHalfWidth = 2;
inline constexpr double kUnstableTrim = 0.1;

bool in_instability_band(std::size_t p, std::size_t n);

/// {lo, lo + step, ...} up to and including hi; requires lo <= hi.
std::vector<std::size_t> make_grid(std::size_t lo, std::size_t hi, std::size_t step);

/// Risk of the Gaussian model averaged over a uniformly random T. With
/// sigma = 0 this is random_selection_risk; with noise, the theorems are
/// linear in the split norms, so it is theorem2_risk at the expected norms.
RiskValue random_selection_theory(double beta_norm_sq, double sigma, std::size_t D, std::size_t n, std::size_t p);

RiskCurve run_experiment(const ExperimentConfig& config);

/// Header `p,theory,mc_mean,mc_stderr,unstable`; divergent theory as `inf`,
/// missing values as empty fields, numbers with 12 significant digits.
std::string format_csv(const RiskCurve& curve);
void write_csv(const RiskCurve& curve, const std::filesystem::path& path);

/// Line chart of theory and Monte Carlo columns on a log-scale y axis.
std::string render_svg(const RiskCurve& curve, const std::string& title);
void write_svg(const RiskCurve& curve, const std::filesystem::path& path, const std::string& title);

/// Overlays keys from a JSON object file onto `config`. Recognized keys:
/// model, D, n, sigma, beta_norm_sq, p_grid, p_min, p_max, p_step, trials,
/// seed, out, svg, threads.
void load_config(const std::filesystem::path& path, ExperimentConfig& config);

}  // namespace descentlab::harness
