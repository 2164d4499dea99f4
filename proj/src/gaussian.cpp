#include "descentlab/gaussian.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

#include "descentlab/linalg.hpp"
#include "descentlab/parallel.hpp"

namespace descentlab::gaussian {

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(cols[k]));
    return out;
}

void check_norms(const SplitNorms& norms) {
    if (norms.in_norm_sq < 0.0 || norms.out_norm_sq < 0.0)
        throw std::invalid_argument("risk: split norms must be nonnegative");
}

double ratio(std::size_t a, std::size_t b) { return static_cast<double>(a) / static_cast<double>(b); }

}  // namespace

void GaussianSpec::validate() const {
    if (D < 1) throw std::invalid_argument("GaussianSpec: D must be >= 1");
    if (n < 1) throw std::invalid_argument("GaussianSpec: n must be >= 1");
    if (!(sigma >= 0.0)) throw std::invalid_argument("GaussianSpec: sigma must be >= 0");
    if (static_cast<std::size_t>(beta.size()) != D)
        throw std::invalid_argument("GaussianSpec: beta has " + std::to_string(beta.size()) + " entries, expected " +
                                    std::to_string(D));
    linalg::require_finite(beta, "GaussianSpec");
}

FeatureSet::FeatureSet(std::vector<std::size_t> indices, std::size_t D) : indices_(std::move(indices)), D_(D) {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (indices_[k] >= D_) throw std::invalid_argument("FeatureSet: index out of range");
        if (k > 0 && indices_[k] <= indices_[k - 1])
            throw std::invalid_argument("FeatureSet: indices must be strictly increasing");
    }
}

FeatureSet FeatureSet::first(std::size_t p, std::size_t D) {
    if (p > D) throw std::invalid_argument("FeatureSet: p exceeds D");
    std::vector<std::size_t> idx(p);
    for (std::size_t k = 0; k < p; ++k) idx[k] = k;
    return FeatureSet(std::move(idx), D);
}

FeatureSet FeatureSet::random(std::size_t p, std::size_t D, Rng& rng) {
    if (p > D) throw std::invalid_argument("FeatureSet: p exceeds D");
    return FeatureSet(random_subset(D, p, rng), D);
}

std::vector<std::size_t> FeatureSet::complement() const {
    std::vector<std::size_t> out;
    out.reserve(D_ - indices_.size());
    std::size_t k = 0;
    for (std::size_t j = 0; j < D_; ++j) {
        if (k < indices_.size() && indices_[k] == j)
            ++k;
        else
            out.push_back(j);
    }
    return out;
}

SplitNorms split_norms(const Eigen::VectorXd& beta, const FeatureSet& T) {
    if (static_cast<std::size_t>(beta.size()) != T.D()) throw std::invalid_argument("split_norms: length mismatch");
    SplitNorms s;
    std::size_t k = 0;
    for (std::size_t j = 0; j < T.D(); ++j) {
        const double b2 = beta(static_cast<Eigen::Index>(j)) * beta(static_cast<Eigen::Index>(j));
        if (k < T.p() && T.indices()[k] == j) {
            s.in_norm_sq += b2;
            ++k;
        } else {
            s.out_norm_sq += b2;
        }
    }
    return s;
}

Design sample_design(const GaussianSpec& spec, const FeatureSet& T, Rng& rng) {
    spec.validate();
    if (T.D() != spec.D) throw std::invalid_argument("sample_design: feature set built for a different D");
    const auto n = static_cast<Eigen::Index>(spec.n);
    const Eigen::MatrixXd x = standard_normal_matrix(n, static_cast<Eigen::Index>(spec.D), rng);
    const Eigen::VectorXd eps = standard_normal_vector(n, rng);

    Design d;
    d.y = x * spec.beta + spec.sigma * eps;
    d.X_T = select_columns(x, T.indices());
    d.X_Tc = select_columns(x, T.complement());
    return d;
}

Eigen::VectorXd fit(const Eigen::MatrixXd& X_T, const Eigen::VectorXd& y, const FeatureSet& T, std::size_t D) {
    if (static_cast<std::size_t>(X_T.cols()) != T.p() || T.D() != D)
        throw std::invalid_argument("fit: design columns do not match the feature set");
    const Eigen::VectorXd coef = linalg::min_norm_solve<double>(X_T, y);
    Eigen::VectorXd beta_hat = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(D));
    for (std::size_t k = 0; k < T.p(); ++k) beta_hat(static_cast<Eigen::Index>(T.indices()[k])) = coef(static_cast<Eigen::Index>(k));
    return beta_hat;
}

RiskValue theorem1_risk(const SplitNorms& norms, std::size_t n, std::size_t p) {
    check_norms(norms);
    if (n < 1) throw std::invalid_argument("theorem1_risk: n must be >= 1");
    const double in = norms.in_norm_sq;
    const double out = norms.out_norm_sq < kZeroOutNorm ? 0.0 : norms.out_norm_sq;

    if (out == 0.0) {
        if (p == 0) return RiskValue::finite(in);
        return RiskValue::finite(in * std::max(1.0 - ratio(n, p), 0.0));
    }
    // No fitted coordinates: beta_hat = 0 whatever n is.
    if (p == 0) return RiskValue::finite(in + out);
    if (p + 2 <= n) return RiskValue::finite(out * (1.0 + ratio(p, n - p - 1)));
    if (p <= n + 1) return RiskValue::divergent();
    return RiskValue::finite(in * (1.0 - ratio(n, p)) + out * (1.0 + ratio(n, p - n - 1)));
}

RiskValue theorem2_risk(const SplitNorms& norms, double sigma, std::size_t n, std::size_t p) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("theorem2_risk: sigma must be >= 0");
    if (sigma == 0.0) return theorem1_risk(norms, n, p);
    check_norms(norms);
    if (n < 1) throw std::invalid_argument("theorem2_risk: n must be >= 1");
    const double s2 = sigma * sigma;
    const double in = norms.in_norm_sq;
    const double out = norms.out_norm_sq;

    if (p == 0) return RiskValue::finite(in + out + s2);
    if (p + 2 <= n) return RiskValue::finite((out + s2) * (1.0 + ratio(p, n - 1 - p)));
    if (p <= n + 1) return RiskValue::divergent();
    return RiskValue::finite(in * (1.0 - ratio(n, p)) + (out + s2) * (1.0 + ratio(n, p - n - 1)));
}

RiskValue random_selection_risk(double beta_norm_sq, std::size_t D, std::size_t n, std::size_t p) {
    if (!(beta_norm_sq >= 0.0)) throw std::invalid_argument("random_selection_risk: ||beta||^2 must be >= 0");
    if (p > D) throw std::invalid_argument("random_selection_risk: p exceeds D");
    if (n < 1) throw std::invalid_argument("random_selection_risk: n must be >= 1");
    const double b = beta_norm_sq;

    if (p == 0) return RiskValue::finite(b);
    if (p + 2 <= n) return RiskValue::finite(b * (1.0 - ratio(p, D)) * (1.0 + ratio(p, n - p - 1)));
    if (p >= n + 2) {
        const double shape = 2.0 - static_cast<double>(D - n - 1) / static_cast<double>(p - n - 1);
        return RiskValue::finite(b * (1.0 - ratio(n, D) * shape));
    }
    // Middle band: divergent unless the expected out-of-T norm vanishes.
    const double expected_out = b * (1.0 - ratio(p, D));
    if (expected_out >= kZeroOutNorm) return RiskValue::divergent();
    return RiskValue::finite(b * std::max(1.0 - ratio(n, p), 0.0));
}

SplitNorms prescient_norms(std::size_t p) {
    // Smallest terms first keeps the partial sum accurate for large p.
    double in = 0.0;
    for (std::size_t j = p; j >= 1; --j) in += 1.0 / (static_cast<double>(j) * static_cast<double>(j));
    const double total = std::numbers::pi * std::numbers::pi / 6.0;
    return {in, std::max(total - in, 0.0)};
}

RiskValue prescient_risk(std::size_t p, std::size_t n) { return theorem1_risk(prescient_norms(p), n, p); }

double trial_loss(const GaussianSpec& spec, const FeatureSet& T, Rng& rng) {
    const Design d = sample_design(spec, T, rng);
    const Eigen::VectorXd beta_hat = fit(d.X_T, d.y, T, spec.D);
    return (spec.beta - beta_hat).squaredNorm() + spec.sigma * spec.sigma;
}

std::vector<double> trial_losses(const GaussianSpec& spec, const FeatureSet& T, std::size_t trials,
                                 std::uint64_t seed, unsigned threads) {
    spec.validate();
    std::vector<double> losses(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng = make_stream(seed, {t});
        losses[t] = trial_loss(spec, T, rng);
    });
    return losses;
}

McEstimate monte_carlo_risk(const GaussianSpec& spec, const FeatureSet& T, std::size_t trials, std::uint64_t seed,
                            unsigned threads) {
    if (trials == 0) throw std::invalid_argument("monte_carlo_risk: trials must be >= 1");
    return summarize(trial_losses(spec, T, trials, seed, threads));
}

}  // namespace descentlab::gaussian
