#include "descentlab/verify.hpp"

#include <cmath>

#include "descentlab/fourier.hpp"
#include "descentlab/gaussian.hpp"
#include "descentlab/linalg.hpp"
#include "descentlab/parallel.hpp"

namespace descentlab::verify {

namespace {

bool agrees(const RiskValue& theory, const McEstimate& mc) {
    if (theory.is_divergent()) return false;
    const double diff = std::abs(mc.mean - theory.value());
    // Exactly deterministic cases (e.g. p = 0) have zero spread.
    return diff <= kAgreementSigmas * mc.std_error + 1e-12 * std::max(1.0, theory.value());
}

}  // namespace

std::vector<PointCheck> gaussian_theorem_suite(std::size_t D, std::size_t n, double sigma, std::size_t trials,
                                               std::size_t band_lo, std::size_t band_hi, std::uint64_t seed,
                                               unsigned threads) {
    Rng beta_rng = make_stream(seed, {0xB, D});
    gaussian::GaussianSpec spec{D, n, sigma, unit_sphere(static_cast<Eigen::Index>(D), beta_rng)};
    spec.validate();

    std::vector<std::size_t> ps;
    for (std::size_t p = 0; p <= D; ++p)
        if (p < band_lo || p > band_hi) ps.push_back(p);

    std::vector<PointCheck> out(ps.size());
    parallel_for(ps.size(), threads, [&](std::size_t i) {
        const std::size_t p = ps[i];
        const auto T = gaussian::FeatureSet::first(p, D);
        PointCheck& c = out[i];
        c.p = p;
        c.theory = gaussian::theorem2_risk(gaussian::split_norms(spec.beta, T), sigma, n, p);
        c.mc = gaussian::monte_carlo_risk(spec, T, trials, derive_seed(seed, {p}), 1);
        c.passed = agrees(c.theory, c.mc);
    });
    return out;
}

std::vector<PairCheck> fourier_eigen_suite(std::size_t D, std::size_t n, std::size_t pairs, std::size_t draws,
                                           std::uint64_t seed, unsigned threads) {
    const fourier::DftMatrix F(D);
    std::vector<PairCheck> out(pairs);
    parallel_for(pairs, threads, [&](std::size_t k) {
        Rng rng = make_stream(seed, {0xF, k});
        std::uniform_int_distribution<std::size_t> pick_p(n, D);
        const std::size_t p = pick_p(rng);
        PairCheck& c = out[k];
        c.S = random_subset(D, n, rng);
        c.T = random_subset(D, p, rng);
        c.theory = fourier::conditional_risk_eigen(F, c.S, c.T);

        // beta_hat_T = F_{S,T}^+ F_{S,:} beta is linear in beta: build the map once.
        const Eigen::MatrixXcd pinv = linalg::pseudo_inverse<linalg::Complex>(F.submatrix(c.S, c.T));
        std::vector<std::size_t> all(D);
        for (std::size_t j = 0; j < D; ++j) all[j] = j;
        const Eigen::MatrixXcd rows = F.submatrix(c.S, all);
        Eigen::MatrixXcd map = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
        const Eigen::MatrixXcd fitted = pinv * rows;
        for (std::size_t t = 0; t < c.T.size(); ++t) map.row(static_cast<Eigen::Index>(c.T[t])) = fitted.row(static_cast<Eigen::Index>(t));
        const Eigen::MatrixXcd residual = Eigen::MatrixXcd::Identity(map.rows(), map.cols()) - map;

        std::vector<double> losses(draws);
        for (std::size_t d = 0; d < draws; ++d) {
            const Eigen::VectorXcd beta = isotropic_complex(static_cast<Eigen::Index>(D), rng);
            losses[d] = (residual * beta).squaredNorm();
        }
        c.mc = summarize(losses);
        c.passed = agrees(c.theory, c.mc);
    });
    return out;
}

}  // namespace descentlab::verify
