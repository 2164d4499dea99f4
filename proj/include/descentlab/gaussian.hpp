#pragma once

// Gaussian feature model: y = x^T beta + sigma * eps with x ~ N(0, I_D).
// The learner regresses on a feature subset T with the min-norm least-squares
// fit and predicts zero on the complement.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "descentlab/random.hpp"
#include "descentlab/risk.hpp"

namespace descentlab::gaussian {

struct GaussianSpec {
    std::size_t D = 1;
    std::size_t n = 1;
    double sigma = 0.0;
    Eigen::VectorXd beta;

    /// Throws std::invalid_argument on D or n = 0, sigma < 0, or a beta of the wrong length.
    void validate() const;
};

/// Subset T of the D coordinates, stored as sorted 0-based indices.
class FeatureSet {
public:
    FeatureSet(std::vector<std::size_t> indices, std::size_t D);

    static FeatureSet first(std::size_t p, std::size_t D);
    static FeatureSet random(std::size_t p, std::size_t D, Rng& rng);

    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    std::size_t p() const noexcept { return indices_.size(); }
    std::size_t D() const noexcept { return D_; }
    std::vector<std::size_t> complement() const;

private:
    std::vector<std::size_t> indices_;
    std::size_t D_;
};

/// ||beta_T||^2 and ||beta_{T^c}||^2.
struct SplitNorms {
    double in_norm_sq = 0.0;
    double out_norm_sq = 0.0;
};

SplitNorms split_norms(const Eigen::VectorXd& beta, const FeatureSet& T);

struct Design {
    Eigen::MatrixXd X_T;   // n x p
    Eigen::MatrixXd X_Tc;  // n x (D - p)
    Eigen::VectorXd y;     // n
};

/// Draws an n x D standard normal design and y = X beta + sigma * eps.
Design sample_design(const GaussianSpec& spec, const FeatureSet& T, Rng& rng);

/// D-vector with X_T^+ y on T and zeros elsewhere.
Eigen::VectorXd fit(const Eigen::MatrixXd& X_T, const Eigen::VectorXd& y, const FeatureSet& T, std::size_t D);

/// Out-of-T norms below this are treated as exactly zero.
inline constexpr double kZeroOutNorm = 1e-12;

RiskValue theorem1_risk(const SplitNorms& norms, std::size_t n, std::size_t p);
RiskValue theorem2_risk(const SplitNorms& norms, double sigma, std::size_t n, std::size_t p);

/// Risk averaged over a uniformly random T of size p (noise-free).
RiskValue random_selection_risk(double beta_norm_sq, std::size_t D, std::size_t n, std::size_t p);

/// Split norms for beta_j^2 = 1/j^2 with D = infinity, T = {1, ..., p}.
SplitNorms prescient_norms(std::size_t p);
RiskValue prescient_risk(std::size_t p, std::size_t n);

/// Parameter-space loss ||beta - beta_hat||^2 + sigma^2 of one fitted trial,
/// which equals the expected squared prediction error on a fresh isotropic x.
double trial_loss(const GaussianSpec& spec, const FeatureSet& T, Rng& rng);

/// Per-trial losses; trial t uses the stream derive_seed(seed, {t}).
std::vector<double> trial_losses(const GaussianSpec& spec, const FeatureSet& T, std::size_t trials,
                                 std::uint64_t seed, unsigned threads = 1);

/// Monte Carlo estimate of E||beta - beta_hat||^2 + sigma^2, directly
/// comparable to theorem2_risk.
McEstimate monte_carlo_risk(const GaussianSpec& spec, const FeatureSet& T, std::size_t trials,
                            std::uint64_t seed, unsigned threads = 1);

}  // namespace descentlab::gaussian
