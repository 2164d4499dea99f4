#pragma once

// Fourier-series model. Rows S and columns T of the D x D unitary DFT are
// sampled; the learner sees F_{S,T} (times diag(t_T) for a decaying feature
// spectrum) and mu_S, fits the min-norm interpolant on T and zero elsewhere.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "descentlab/random.hpp"
#include "descentlab/risk.hpp"

namespace descentlab::fourier {

using IndexSet = std::vector<std::size_t>;  // sorted, 0-based

enum class BetaModel { UnitSphereReal, IsotropicComplex };
enum class Spectrum { Flat, DecayInvSquare };

struct FourierSpec {
    std::size_t D = 1;
    std::size_t n = 1;
    BetaModel beta_model = BetaModel::UnitSphereReal;
    Spectrum spectrum = Spectrum::Flat;

    void validate() const;
};

/// F_{i,j} = D^{-1/2} omega^{ij}, omega = exp(-2 pi i / D), 0-based i, j.
class DftMatrix {
public:
    explicit DftMatrix(std::size_t D);

    std::size_t size() const noexcept { return D_; }
    const Eigen::MatrixXcd& matrix() const noexcept { return f_; }
    Eigen::MatrixXcd submatrix(const IndexSet& rows, const IndexSet& cols) const;

private:
    std::size_t D_;
    Eigen::MatrixXcd f_;
};

DftMatrix dft_matrix(std::size_t D);

/// Squared feature scales t_i^2: all ones (flat) or i^{-2} normalized to sum 1.
struct SpectrumWeights {
    Spectrum kind = Spectrum::Flat;
    Eigen::VectorXd t_sq;
};

SpectrumWeights spectrum_weights(std::size_t D, Spectrum kind);

/// Sorted complement of `set` in {0, ..., D-1}.
IndexSet complement(const IndexSet& set, std::size_t D);

/// beta_hat with beta_hat_T = (F diag(t))_{S,T}^+ mu_S, mu = F diag(t) beta,
/// and zeros off T. For a flat spectrum t = 1.
Eigen::VectorXcd fit_fourier(const DftMatrix& F, const IndexSet& S, const IndexSet& T, const Eigen::VectorXcd& beta,
                             const SpectrumWeights& w);

/// Eigenvalue pole tolerance: lambda >= 1 - kPoleTol is treated as a pole.
inline constexpr double kPoleTol = 1e-10;

/// E[||beta - beta_hat||^2 | S, T] under E[beta beta^H] = I/D, flat spectrum,
/// |T| >= |S|:  1 - 2n/D + (1/D) sum_i 1/(1 - lambda_i), lambda_i the
/// eigenvalues of F_{S,T^c} F_{S,T^c}^H.
RiskValue conditional_risk_eigen(const DftMatrix& F, const IndexSet& S, const IndexSet& T);

/// Large-D limit of the expected risk at fixed rho_n = n/D < rho_p = p/D.
double asymptotic_risk(double rho_n, double rho_p);

/// sum_j t_j^2 |beta_j - beta_hat_j|^2.
double weighted_risk(const Eigen::VectorXcd& beta, const Eigen::VectorXcd& beta_hat, const SpectrumWeights& w);

/// One (S, T) draw for repeat r. S is a uniform n-subset. With a flat
/// spectrum T is the first p entries of a uniform permutation drawn from the
/// same stream, so T grows by nesting as p increases; with a decaying
/// spectrum T = {0, ..., p-1}.
struct SubsetDraw {
    IndexSet S;
    IndexSet T;
};

SubsetDraw draw_subsets(const FourierSpec& spec, std::size_t p, std::uint64_t seed, std::size_t repeat);

/// Coefficient vector for a figure run.
Eigen::VectorXcd draw_beta(BetaModel model, std::size_t D, Rng& rng);

/// Per-repeat losses (flat: ||beta - beta_hat||^2, decay: weighted risk).
std::vector<double> repeat_losses(const DftMatrix& F, const FourierSpec& spec, std::size_t p, std::size_t repeats,
                                  std::uint64_t seed, const Eigen::VectorXcd& beta, unsigned threads = 1);

McEstimate monte_carlo_fourier(const DftMatrix& F, const FourierSpec& spec, std::size_t p, std::size_t repeats,
                               std::uint64_t seed, const Eigen::VectorXcd& beta, unsigned threads = 1);

/// conditional_risk_eigen averaged over the same (S, T) draws that
/// repeat_losses uses; divergent if any draw is.
RiskValue averaged_conditional_risk(const DftMatrix& F, const FourierSpec& spec, std::size_t p, std::size_t repeats,
                                    std::uint64_t seed, unsigned threads = 1);

}  // namespace descentlab::fourier
