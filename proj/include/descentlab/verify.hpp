#pragma once

// Theory-versus-simulation suites: each closed form is compared against an
// independent Monte Carlo estimate at a 3-standard-error tolerance.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "descentlab/random.hpp"
#include "descentlab/risk.hpp"

namespace descentlab::verify {

inline constexpr double kAgreementSigmas = 3.0;

struct PointCheck {
    std::size_t p = 0;
    RiskValue theory = RiskValue::divergent();
    McEstimate mc;
    bool passed = false;
};

/// Fixed random unit beta, T = first p coordinates, every p in [0, D]
/// outside [band_lo, band_hi]; theorem2_risk (theorem1 when sigma = 0)
/// against monte_carlo_risk.
std::vector<PointCheck> gaussian_theorem_suite(std::size_t D, std::size_t n, double sigma, std::size_t trials,
                                               std::size_t band_lo, std::size_t band_hi, std::uint64_t seed,
                                               unsigned threads = 0);

struct PairCheck {
    std::vector<std::size_t> S;
    std::vector<std::size_t> T;
    RiskValue theory = RiskValue::divergent();
    McEstimate mc;
    bool passed = false;
};

/// Random (S, T) pairs with |T| >= |S|; conditional_risk_eigen against a
/// Monte Carlo average of ||beta - beta_hat||^2 over isotropic complex beta.
std::vector<PairCheck> fourier_eigen_suite(std::size_t D, std::size_t n, std::size_t pairs, std::size_t draws,
                                           std::uint64_t seed, unsigned threads = 0);

}  // namespace descentlab::verify
