#include <doctest.h>

#include <cmath>
#include <numbers>

#include "descentlab/gaussian.hpp"
#include "descentlab/linalg.hpp"

using namespace descentlab;
using namespace descentlab::gaussian;

namespace {

const double kPi2Over6 = std::numbers::pi * std::numbers::pi / 6.0;

GaussianSpec unit_spec(std::size_t D, std::size_t n, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    return {D, n, sigma, unit_sphere(static_cast<Eigen::Index>(D), rng)};
}

void check_within_3se(const McEstimate& mc, double expected) {
    CAPTURE(mc.mean);
    CAPTURE(mc.std_error);
    CAPTURE(expected);
    CHECK(std::abs(mc.mean - expected) <= 3.0 * mc.std_error);
}

}  // namespace

TEST_SUITE("gaussian") {

TEST_CASE("spec and feature set validation") {
    CHECK_THROWS_AS((GaussianSpec{0, 1, 0.0, Eigen::VectorXd()}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GaussianSpec{2, 0, 0.0, Eigen::VectorXd::Zero(2)}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GaussianSpec{2, 1, -1.0, Eigen::VectorXd::Zero(2)}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((GaussianSpec{2, 1, 0.0, Eigen::VectorXd::Zero(3)}.validate()), std::invalid_argument);
    CHECK_THROWS_AS(FeatureSet({1, 1}, 3), std::invalid_argument);
    CHECK_THROWS_AS(FeatureSet({2, 0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(FeatureSet({3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(FeatureSet::first(4, 3), std::invalid_argument);

    const FeatureSet T({0, 2}, 4);
    CHECK(T.p() == 2);
    CHECK(T.complement() == std::vector<std::size_t>{1, 3});

    Rng rng(1);
    const FeatureSet R = FeatureSet::random(5, 9, rng);
    CHECK(R.p() == 5);
}

TEST_CASE("split norms partition the squared norm") {
    Rng rng(2);
    for (std::size_t p = 0; p <= 12; ++p) {
        const Eigen::VectorXd beta = standard_normal_vector(12, rng);
        const FeatureSet T = FeatureSet::random(p, 12, rng);
        const SplitNorms s = split_norms(beta, T);
        CHECK(s.in_norm_sq >= 0.0);
        CHECK(s.out_norm_sq >= 0.0);
        CHECK(s.in_norm_sq + s.out_norm_sq == doctest::Approx(beta.squaredNorm()).epsilon(1e-10));
    }
}

TEST_CASE("sample_design") {
    Rng rng(3);
    SUBCASE("zero beta, no noise gives zero responses") {
        const GaussianSpec spec{5, 7, 0.0, Eigen::VectorXd::Zero(5)};
        const Design d = sample_design(spec, FeatureSet::first(2, 5), rng);
        CHECK(d.y.isZero());
        CHECK(d.X_T.rows() == 7);
        CHECK(d.X_T.cols() == 2);
        CHECK(d.X_Tc.cols() == 3);
    }
    SUBCASE("responses read off the active column") {
        Eigen::VectorXd beta(2);
        beta << 1, 0;
        const GaussianSpec spec{2, 6, 0.0, beta};
        const Design d = sample_design(spec, FeatureSet::first(1, 2), rng);
        CHECK((d.y - d.X_T.col(0)).norm() == 0.0);
    }
    SUBCASE("entries are standard normal") {
        const GaussianSpec spec{100, 100, 0.0, Eigen::VectorXd::Zero(100)};
        const FeatureSet T = FeatureSet::first(40, 100);
        double sum = 0.0, sumsq = 0.0;
        std::size_t count = 0;
        for (int rep = 0; rep < 100; ++rep) {
            const Design d = sample_design(spec, T, rng);
            for (const Eigen::MatrixXd* m : {&d.X_T, &d.X_Tc}) {
                sum += m->sum();
                sumsq += m->squaredNorm();
                count += static_cast<std::size_t>(m->size());
            }
        }
        CHECK(count == 1000000);
        const double mean = sum / static_cast<double>(count);
        const double var = sumsq / static_cast<double>(count) - mean * mean;
        CHECK(std::abs(mean) < 0.01);
        CHECK(std::abs(var - 1.0) < 0.01);
    }
}

TEST_CASE("fit") {
    SUBCASE("zero responses") {
        Rng rng(4);
        const FeatureSet T({1, 3}, 5);
        CHECK(fit(standard_normal_matrix(3, 2, rng), Eigen::VectorXd::Zero(3), T, 5).isZero());
    }
    SUBCASE("exact recovery at full square rank") {
        const GaussianSpec spec = unit_spec(8, 8, 0.0, 5);
        Rng rng(6);
        const FeatureSet T = FeatureSet::first(8, 8);
        const Design d = sample_design(spec, T, rng);
        CHECK((fit(d.X_T, d.y, T, 8) - spec.beta).norm() <= 1e-6);
    }
    SUBCASE("one equation, two unknowns") {
        Eigen::MatrixXd x(1, 2);
        x << 1, 1;
        Eigen::VectorXd y(1);
        y << 2;
        const Eigen::VectorXd b = fit(x, y, FeatureSet({0, 2}, 3), 3);
        CHECK(b(0) == doctest::Approx(1.0));
        CHECK(b(1) == 0.0);
        CHECK(b(2) == doctest::Approx(1.0));
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(fit(Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Ones(2), FeatureSet::first(2, 4), 4),
                        std::invalid_argument);
    }
}

TEST_CASE("theorem1_risk branches") {
    CHECK(theorem1_risk({0.5, 1.0}, 40, 20).value() == doctest::Approx(1.0 + 20.0 / 19.0));
    CHECK(theorem1_risk({0.5, 1.0}, 40, 20).value() == doctest::Approx(2.05263).epsilon(1e-5));
    CHECK(theorem1_risk({0.0, 1.0}, 40, 40).is_divergent());
    CHECK(theorem1_risk({0.0, 1.0}, 40, 39).is_divergent());
    CHECK(theorem1_risk({0.0, 1.0}, 40, 41).is_divergent());
    CHECK_FALSE(theorem1_risk({0.0, 1.0}, 40, 38).is_divergent());
    CHECK_FALSE(theorem1_risk({0.0, 1.0}, 40, 42).is_divergent());
    CHECK(theorem1_risk({1.0, 0.0}, 40, 80).value() == doctest::Approx(0.5));
    CHECK(theorem1_risk({0.3, 0.7}, 40, 50).value() ==
          doctest::Approx(0.3 * (1.0 - 40.0 / 50.0) + 0.7 * (1.0 + 40.0 / 9.0)));
    CHECK(theorem1_risk({0.0, 2.0}, 40, 0).value() == doctest::Approx(2.0));
    CHECK_THROWS_AS(theorem1_risk({-1.0, 0.0}, 4, 2), std::invalid_argument);
}

TEST_CASE("zero out-of-T norm takes precedence over the divergent band") {
    CHECK(theorem1_risk({1.0, 0.0}, 40, 40).value() == doctest::Approx(0.0));
    CHECK(theorem1_risk({1.0, 0.0}, 40, 41).value() == doctest::Approx(1.0 / 41.0));
    CHECK(theorem1_risk({1.0, 1e-13}, 40, 41).value() == doctest::Approx(1.0 / 41.0));
    CHECK(theorem1_risk({1.0, 0.0}, 40, 10).value() == 0.0);
    CHECK(theorem1_risk({1.0, 1e-11}, 40, 41).is_divergent());
}

TEST_CASE("RiskValue keeps divergence out of arithmetic") {
    const RiskValue d = RiskValue::divergent();
    CHECK(d.is_divergent());
    CHECK_THROWS_AS(d.value(), std::logic_error);
    CHECK_THROWS_AS(RiskValue::finite(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(RiskValue::finite(-1.0), std::invalid_argument);
}

TEST_CASE("theorem2_risk") {
    CHECK(theorem2_risk({0.0, 0.0}, 1.0, 40, 20).value() == doctest::Approx(2.05263).epsilon(1e-5));
    CHECK(theorem2_risk({0.3, 0.0}, 1.0, 40, 41).is_divergent());
    CHECK(theorem2_risk({0.3, 0.0}, 1.0, 40, 39).is_divergent());
    CHECK(theorem2_risk({0.3, 0.2}, 0.5, 40, 60).value() ==
          doctest::Approx(0.3 * (1.0 - 40.0 / 60.0) + (0.2 + 0.25) * (1.0 + 40.0 / 19.0)));
    CHECK_THROWS_AS(theorem2_risk({0.0, 0.0}, -0.1, 4, 2), std::invalid_argument);

    Rng rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::uniform_int_distribution<std::size_t> count(1, 60);
    for (int rep = 0; rep < 50; ++rep) {
        const SplitNorms s{u(rng), rep % 5 == 0 ? 0.0 : u(rng)};
        const std::size_t n = count(rng), p = count(rng) - 1;
        CHECK(theorem2_risk(s, 0.0, n, p) == theorem1_risk(s, n, p));
    }
}

TEST_CASE("random_selection_risk") {
    CHECK(random_selection_risk(1.0, 100, 40, 0).value() == doctest::Approx(1.0));
    CHECK(random_selection_risk(1.0, 100, 40, 100).value() == doctest::Approx(0.6));
    CHECK(random_selection_risk(1.0, 100, 40, 42).value() == doctest::Approx(23.8));
    for (std::size_t p : {39u, 40u, 41u}) CHECK(random_selection_risk(1.0, 100, 40, p).is_divergent());
    CHECK_THROWS_AS(random_selection_risk(1.0, 10, 4, 11), std::invalid_argument);

    // p = D removes the out-of-T mass, even inside the middle band.
    CHECK(random_selection_risk(2.0, 40, 40, 40).value() == doctest::Approx(0.0));
    CHECK(random_selection_risk(2.0, 41, 40, 41).value() == doctest::Approx(2.0 / 41.0));
}

TEST_CASE("random_selection_risk equals Theorem 1 at the expected split norms") {
    for (std::size_t p = 0; p <= 100; ++p) {
        const double frac = static_cast<double>(p) / 100.0;
        const RiskValue a = random_selection_risk(1.0, 100, 40, p);
        const RiskValue b = theorem1_risk({frac, 1.0 - frac}, 40, p);
        REQUIRE(a.is_divergent() == b.is_divergent());
        if (!a.is_divergent()) CHECK(a.value() == doctest::Approx(b.value()).epsilon(1e-12));
    }
}

TEST_CASE("random selection monotonicity") {
    const std::size_t D = 100, n = 40;
    for (std::size_t p = 1; p + 2 <= n; ++p)
        CHECK(random_selection_risk(1.0, D, n, p).value() >= random_selection_risk(1.0, D, n, p - 1).value());
    for (std::size_t p = n + 3; p <= D; ++p)
        CHECK(random_selection_risk(1.0, D, n, p).value() <= random_selection_risk(1.0, D, n, p - 1).value());
}

TEST_CASE("risk at p = D is ||beta||^2 (1 - n/D)") {
    for (auto [D, n] : {std::pair<std::size_t, std::size_t>{100, 40}, {50, 10}, {30, 27}, {12, 12}, {9, 3}}) {
        CAPTURE(D);
        CAPTURE(n);
        CHECK(random_selection_risk(1.7, D, n, D).value() ==
              doctest::Approx(1.7 * (1.0 - static_cast<double>(n) / static_cast<double>(D))));
    }
}

TEST_CASE("prescient model") {
    const SplitNorms p0 = prescient_norms(0);
    CHECK(p0.in_norm_sq == 0.0);
    CHECK(p0.out_norm_sq == doctest::Approx(1.644934).epsilon(1e-6));
    const SplitNorms p1 = prescient_norms(1);
    CHECK(p1.in_norm_sq == doctest::Approx(1.0));
    CHECK(p1.out_norm_sq == doctest::Approx(0.644934).epsilon(1e-6));
    const SplitNorms p2 = prescient_norms(2);
    CHECK(p2.in_norm_sq == doctest::Approx(1.25));
    CHECK(p2.out_norm_sq == doctest::Approx(0.394934).epsilon(1e-5));

    CHECK(prescient_risk(1, 40).value() == doctest::Approx((kPi2Over6 - 1.0) * (1.0 + 1.0 / 38.0)));
    CHECK(prescient_risk(1, 40).value() == doctest::Approx(0.661907).epsilon(1e-5));
    CHECK(prescient_risk(40, 40).is_divergent());

    const double far = prescient_risk(1000000, 40).value();
    CHECK(far < kPi2Over6);
    CHECK(kPi2Over6 - far < 1e-3);
}

TEST_CASE("prescient risk approaches pi^2/6 from below") {
    double prev = 0.0;
    for (std::size_t p : {100u, 1000u, 10000u, 100000u}) {
        const double r = prescient_risk(p, 40).value();
        CHECK(r < kPi2Over6);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("monte_carlo_risk errors and exact cases") {
    const GaussianSpec spec = unit_spec(10, 10, 0.0, 8);
    CHECK_THROWS_AS(monte_carlo_risk(spec, FeatureSet::first(10, 10), 0, 1), std::invalid_argument);
    const McEstimate m = monte_carlo_risk(spec, FeatureSet::first(10, 10), 20, 9);
    CHECK(std::abs(m.mean) <= 1e-10);
}

TEST_CASE("monte_carlo_risk matches the closed forms") {
    SUBCASE("Theorem 1, p < n") {
        const GaussianSpec spec = unit_spec(100, 40, 0.0, 10);
        const FeatureSet T = FeatureSet::first(20, 100);
        const McEstimate m = monte_carlo_risk(spec, T, 2000, 11, 0);
        check_within_3se(m, theorem1_risk(split_norms(spec.beta, T), 40, 20).value());
    }
    SUBCASE("Theorem 2, p > n") {
        const GaussianSpec spec = unit_spec(100, 40, 0.1, 12);
        const FeatureSet T = FeatureSet::first(80, 100);
        const McEstimate m = monte_carlo_risk(spec, T, 2000, 13, 0);
        check_within_3se(m, theorem2_risk(split_norms(spec.beta, T), 0.1, 40, 80).value());
    }
}

TEST_CASE("trial losses do not depend on the thread count") {
    const GaussianSpec spec = unit_spec(30, 12, 0.5, 14);
    const FeatureSet T = FeatureSet::first(20, 30);
    CHECK(trial_losses(spec, T, 64, 15, 1) == trial_losses(spec, T, 64, 15, 4));
}

TEST_CASE("per-trial risk decomposition and Pythagoras") {
    Rng rng(16);
    for (std::size_t p : {20u, 25u, 30u}) {
        const GaussianSpec spec = unit_spec(30, 12, 0.0, 17 + p);
        const FeatureSet T = FeatureSet::random(p, 30, rng);
        for (int rep = 0; rep < 10; ++rep) {
            const Design d = sample_design(spec, T, rng);
            const Eigen::VectorXd bhat = fit(d.X_T, d.y, T, 30);
            const SplitNorms s = split_norms(spec.beta, T);

            Eigen::VectorXd beta_T(static_cast<Eigen::Index>(p)), beta_Tc(static_cast<Eigen::Index>(30 - p));
            Eigen::VectorXd bhat_T(static_cast<Eigen::Index>(p));
            const auto Tc = T.complement();
            for (std::size_t k = 0; k < p; ++k) {
                beta_T(static_cast<Eigen::Index>(k)) = spec.beta(static_cast<Eigen::Index>(T.indices()[k]));
                bhat_T(static_cast<Eigen::Index>(k)) = bhat(static_cast<Eigen::Index>(T.indices()[k]));
            }
            for (std::size_t k = 0; k < Tc.size(); ++k)
                beta_Tc(static_cast<Eigen::Index>(k)) = spec.beta(static_cast<Eigen::Index>(Tc[k]));

            const double total = (spec.beta - bhat).squaredNorm();
            const double inner = (beta_T - bhat_T).squaredNorm();
            CHECK(total == doctest::Approx(s.out_norm_sq + inner).epsilon(1e-12));

            // Null-space part plus row-space part, with (X X^T)^{-1} from a Cholesky factorization.
            const Eigen::MatrixXd pi = linalg::projection_onto_rowspace<double>(d.X_T);
            const Eigen::MatrixXd gram_inv = (d.X_T * d.X_T.transpose()).llt().solve(Eigen::MatrixXd::Identity(12, 12));
            const double null_part =
                ((Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) - pi) * beta_T)
                    .squaredNorm();
            const double row_part = (d.X_T.transpose() * gram_inv * d.X_Tc * beta_Tc).squaredNorm();
            CHECK(std::abs(inner - (null_part + row_part)) <= 1e-8 * inner);
        }
    }
}

TEST_CASE("projection moment E||Pi beta_T||^2 = ||beta_T||^2 n/p") {
    for (auto [n, p] : {std::pair<Eigen::Index, Eigen::Index>{5, 10}, {10, 40}, {40, 80}}) {
        CAPTURE(n);
        CAPTURE(p);
        Rng rng(derive_seed(18, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p)}));
        const Eigen::VectorXd beta_T = unit_sphere(p, rng);
        std::vector<double> vals(5000);
        for (double& v : vals) {
            const Eigen::MatrixXd x = standard_normal_matrix(n, p, rng);
            v = (linalg::projection_onto_rowspace<double>(x) * beta_T).squaredNorm();
        }
        check_within_3se(summarize(vals), static_cast<double>(n) / static_cast<double>(p));
    }
}

TEST_CASE("inverse-Wishart trace E tr((X X^T)^+) = n/(p-n-1)") {
    for (auto [n, p] : {std::pair<Eigen::Index, Eigen::Index>{5, 10}, {10, 20}}) {
        CAPTURE(n);
        CAPTURE(p);
        Rng rng(derive_seed(19, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p)}));
        std::vector<double> vals(20000);
        for (double& v : vals) {
            const Eigen::MatrixXd x = standard_normal_matrix(n, p, rng);
            v = linalg::pseudo_inverse<double>(Eigen::MatrixXd(x * x.transpose())).trace();
        }
        check_within_3se(summarize(vals), static_cast<double>(n) / static_cast<double>(p - n - 1));
    }
}

}  // TEST_SUITE
