#include "descentlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "descentlab/linalg.hpp"
#include "descentlab/parallel.hpp"

namespace descentlab::fourier {

namespace {

void check_subset(const IndexSet& set, std::size_t D, const char* name) {
    for (std::size_t k = 0; k < set.size(); ++k) {
        if (set[k] >= D) throw std::invalid_argument(std::string(name) + ": index out of range");
        if (k > 0 && set[k] <= set[k - 1])
            throw std::invalid_argument(std::string(name) + ": indices must be strictly increasing");
    }
}

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

void FourierSpec::validate() const {
    if (D < 1) throw std::invalid_argument("FourierSpec: D must be >= 1");
    if (n < 1 || n > D) throw std::invalid_argument("FourierSpec: n must lie in [1, D]");
}

DftMatrix::DftMatrix(std::size_t D) : D_(D) {
    if (D < 1) throw std::invalid_argument("dft_matrix: D must be >= 1");
    const double scale = 1.0 / std::sqrt(static_cast<double>(D));
    const double step = -2.0 * std::numbers::pi / static_cast<double>(D);
    f_.resize(idx(D), idx(D));
    // Reduce the exponent mod D so large products keep full phase accuracy.
    for (std::size_t i = 0; i < D; ++i)
        for (std::size_t j = 0; j < D; ++j)
            f_(idx(i), idx(j)) = std::polar(scale, step * static_cast<double>((i * j) % D));
}

Eigen::MatrixXcd DftMatrix::submatrix(const IndexSet& rows, const IndexSet& cols) const {
    Eigen::MatrixXcd out(idx(rows.size()), idx(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] >= D_) throw std::invalid_argument("DftMatrix: column index out of range");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r] >= D_) throw std::invalid_argument("DftMatrix: row index out of range");
            out(idx(r), idx(c)) = f_(idx(rows[r]), idx(cols[c]));
        }
    }
    return out;
}

DftMatrix dft_matrix(std::size_t D) { return DftMatrix(D); }

SpectrumWeights spectrum_weights(std::size_t D, Spectrum kind) {
    if (D < 1) throw std::invalid_argument("spectrum_weights: D must be >= 1");
    SpectrumWeights w;
    w.kind = kind;
    if (kind == Spectrum::Flat) {
        w.t_sq = Eigen::VectorXd::Ones(idx(D));
        return w;
    }
    w.t_sq.resize(idx(D));
    for (std::size_t i = 0; i < D; ++i) {
        const double k = static_cast<double>(i + 1);
        w.t_sq(idx(i)) = 1.0 / (k * k);
    }
    w.t_sq /= w.t_sq.sum();
    return w;
}

IndexSet complement(const IndexSet& set, std::size_t D) {
    IndexSet out;
    out.reserve(D >= set.size() ? D - set.size() : 0);
    std::size_t k = 0;
    for (std::size_t j = 0; j < D; ++j) {
        if (k < set.size() && set[k] == j)
            ++k;
        else
            out.push_back(j);
    }
    return out;
}

Eigen::VectorXcd fit_fourier(const DftMatrix& F, const IndexSet& S, const IndexSet& T, const Eigen::VectorXcd& beta,
                             const SpectrumWeights& w) {
    const std::size_t D = F.size();
    if (static_cast<std::size_t>(beta.size()) != D || static_cast<std::size_t>(w.t_sq.size()) != D)
        throw std::invalid_argument("fit_fourier: beta and weights must have D entries");
    check_subset(S, D, "fit_fourier S");
    check_subset(T, D, "fit_fourier T");

    Eigen::VectorXcd beta_hat = Eigen::VectorXcd::Zero(idx(D));
    if (T.empty() || S.empty()) return beta_hat;

    const Eigen::VectorXd t = w.t_sq.cwiseSqrt();
    const Eigen::VectorXcd scaled = t.cast<linalg::Complex>().cwiseProduct(beta);
    Eigen::VectorXcd mu_S(idx(S.size()));
    for (std::size_t r = 0; r < S.size(); ++r) mu_S(idx(r)) = (F.matrix().row(idx(S[r])) * scaled).value();

    Eigen::MatrixXcd design = F.submatrix(S, T);
    for (std::size_t c = 0; c < T.size(); ++c) design.col(idx(c)) *= t(idx(T[c]));

    const Eigen::VectorXcd coef = linalg::min_norm_solve<linalg::Complex>(design, mu_S);
    for (std::size_t c = 0; c < T.size(); ++c) beta_hat(idx(T[c])) = coef(idx(c));
    return beta_hat;
}

RiskValue conditional_risk_eigen(const DftMatrix& F, const IndexSet& S, const IndexSet& T) {
    const std::size_t D = F.size();
    check_subset(S, D, "conditional_risk_eigen S");
    check_subset(T, D, "conditional_risk_eigen T");
    if (S.empty()) throw std::invalid_argument("conditional_risk_eigen: S must be nonempty");
    if (T.size() < S.size()) throw std::invalid_argument("conditional_risk_eigen: requires |T| >= |S|");

    const double n = static_cast<double>(S.size());
    const double d = static_cast<double>(D);
    const IndexSet Tc = complement(T, D);
    if (Tc.empty()) return RiskValue::finite(1.0 - n / d);

    const Eigen::MatrixXcd B = F.submatrix(S, Tc);
    const Eigen::MatrixXcd gram = B * B.adjoint();
    const Eigen::VectorXd lambda = linalg::hermitian_eigenvalues<linalg::Complex>(gram);

    double pole_sum = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) >= 1.0 - kPoleTol) return RiskValue::divergent();
        pole_sum += 1.0 / (1.0 - lambda(i));
    }
    return RiskValue::finite(std::max(1.0 - 2.0 * n / d + pole_sum / d, 0.0));
}

double asymptotic_risk(double rho_n, double rho_p) {
    if (!(rho_n > 0.0 && rho_n < 1.0)) throw std::invalid_argument("asymptotic_risk: rho_n must lie in (0, 1)");
    if (!(rho_p > rho_n && rho_p <= 1.0)) throw std::invalid_argument("asymptotic_risk: rho_p must lie in (rho_n, 1]");
    return 1.0 - rho_n * (2.0 - rho_p * (1.0 - rho_n) / (rho_p - rho_n));
}

double weighted_risk(const Eigen::VectorXcd& beta, const Eigen::VectorXcd& beta_hat, const SpectrumWeights& w) {
    if (beta.size() != beta_hat.size() || beta.size() != w.t_sq.size())
        throw std::invalid_argument("weighted_risk: length mismatch");
    return (beta - beta_hat).cwiseAbs2().dot(w.t_sq);
}

SubsetDraw draw_subsets(const FourierSpec& spec, std::size_t p, std::uint64_t seed, std::size_t repeat) {
    spec.validate();
    if (p > spec.D) throw std::invalid_argument("draw_subsets: p exceeds D");
    Rng rng = make_stream(seed, {repeat});
    SubsetDraw draw;
    draw.S = random_subset(spec.D, spec.n, rng);
    if (spec.spectrum == Spectrum::Flat) {
        IndexSet perm = random_permutation(spec.D, rng);
        perm.resize(p);
        std::sort(perm.begin(), perm.end());
        draw.T = std::move(perm);
    } else {
        draw.T.resize(p);
        for (std::size_t j = 0; j < p; ++j) draw.T[j] = j;
    }
    return draw;
}

Eigen::VectorXcd draw_beta(BetaModel model, std::size_t D, Rng& rng) {
    if (model == BetaModel::IsotropicComplex) return isotropic_complex(idx(D), rng);
    return unit_sphere(idx(D), rng).cast<linalg::Complex>();
}

std::vector<double> repeat_losses(const DftMatrix& F, const FourierSpec& spec, std::size_t p, std::size_t repeats,
                                  std::uint64_t seed, const Eigen::VectorXcd& beta, unsigned threads) {
    spec.validate();
    if (F.size() != spec.D) throw std::invalid_argument("repeat_losses: DFT size does not match spec");
    if (spec.spectrum == Spectrum::Flat && p < spec.n)
        throw std::invalid_argument("monte_carlo_fourier: the flat model requires p >= n");
    const SpectrumWeights w = spectrum_weights(spec.D, spec.spectrum);
    std::vector<double> losses(repeats);
    parallel_for(repeats, threads, [&](std::size_t r) {
        const SubsetDraw draw = draw_subsets(spec, p, seed, r);
        const Eigen::VectorXcd beta_hat = fit_fourier(F, draw.S, draw.T, beta, w);
        losses[r] = weighted_risk(beta, beta_hat, w);
    });
    return losses;
}

McEstimate monte_carlo_fourier(const DftMatrix& F, const FourierSpec& spec, std::size_t p, std::size_t repeats,
                               std::uint64_t seed, const Eigen::VectorXcd& beta, unsigned threads) {
    if (repeats == 0) throw std::invalid_argument("monte_carlo_fourier: repeats must be >= 1");
    return summarize(repeat_losses(F, spec, p, repeats, seed, beta, threads));
}

RiskValue averaged_conditional_risk(const DftMatrix& F, const FourierSpec& spec, std::size_t p, std::size_t repeats,
                                    std::uint64_t seed, unsigned threads) {
    if (repeats == 0) throw std::invalid_argument("averaged_conditional_risk: repeats must be >= 1");
    if (spec.spectrum != Spectrum::Flat)
        throw std::invalid_argument("averaged_conditional_risk: defined for the flat spectrum only");
    std::vector<RiskValue> values(repeats, RiskValue::divergent());
    parallel_for(repeats, threads, [&](std::size_t r) {
        const SubsetDraw draw = draw_subsets(spec, p, seed, r);
        values[r] = conditional_risk_eigen(F, draw.S, draw.T);
    });
    double sum = 0.0;
    for (const RiskValue& v : values) {
        if (v.is_divergent()) return RiskValue::divergent();
        sum += v.value();
    }
    return RiskValue::finite(sum / static_cast<double>(repeats));
}

}  // namespace descentlab::fourier
