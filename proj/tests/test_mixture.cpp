#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "villebet/mixture.hpp"

namespace villebet {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(MixtureEngine, FreshEngineIsLogMass) {
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        for (PriorKind kind : {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun}) {
            const PriorSpec prior = make_prior(kind, cfg);
            MixtureEngine engine(prior, cfg);
            EXPECT_NEAR(engine.log_mixture_wealth(), std::log(total_mass(prior, cfg)), 1e-9);
            EXPECT_EQ(engine.n(), 0u);
        }
    }
    const MarketConfig cfg = make_market(0.5);
    EXPECT_NEAR(MixtureEngine(make_prior(PriorKind::Robbins, cfg), cfg).log_mixture_wealth(), std::log(0.5), 1e-9);
}

// Closed-form polynomial integrals of the uniform mixture at m0 = 0.5:
// (1/4) int (1 - l/2) dl = 1 and (1/4) int (1 - l^2/4) dl = 2/3 over [-2, 2].
TEST(MixtureEngine, UniformClosedForms) {
    const MarketConfig cfg = make_market(0.5);
    const PriorSpec uniform = make_prior(PriorKind::Uniform, cfg);
    MixtureEngine engine(uniform, cfg, 64);
    engine.step(1.0);
    EXPECT_NEAR(engine.log_mixture_wealth(), 0.0, 1e-9);
    engine.step(0.0);
    EXPECT_NEAR(engine.log_mixture_wealth(), std::log(2.0 / 3.0), 1e-9);
}

// Uniform at m0 = 0.25 after [1, 1]: (3/16) int_{-4}^{4/3} (1 - 3l/4)^2 dl.
TEST(MixtureEngine, UniformAsymmetricClosedForm) {
    const MarketConfig cfg = make_market(0.25);
    MixtureEngine engine(make_prior(PriorKind::Uniform, cfg), cfg);
    engine.step(1.0);
    engine.step(1.0);
    // Antiderivative of (1 - 3l/4)^2 is -(4/9)(1 - 3l/4)^3.
    const auto anti = [](double l) { return -(4.0 / 9.0) * std::pow(1.0 - 0.75 * l, 3); };
    const double exact = (3.0 / 16.0) * (anti(4.0 / 3.0) - anti(-4.0));
    EXPECT_NEAR(engine.log_mixture_wealth(), std::log(exact), 1e-9);
}

TEST(MixtureEngine, NullValueLeavesWealthUnchanged) {
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        for (PriorKind kind : {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun}) {
            MixtureEngine engine(make_prior(kind, cfg), cfg, 128);
            engine.step(0.9);
            const LogWealth before = engine.log_mixture_wealth();
            engine.step(m0);
            EXPECT_EQ(engine.log_mixture_wealth(), before);
        }
    }
}

TEST(MixtureEngine, NodeWealthMatchesFold) {
    const MarketConfig cfg = make_market(0.3);
    MixtureEngine engine(make_prior(PriorKind::Robbins, cfg), cfg, 64);
    const std::vector<double> path{0.1, 0.9, 0.3, 1.0, 0.0, 0.45};
    for (double x : path) engine.step(x);
    for (std::size_t k = 0; k < engine.nodes().size(); ++k) {
        double fold = 0.0;
        for (double x : path) fold += log_payoff(engine.nodes().lambda[k], x, cfg);
        EXPECT_NEAR(engine.node_log_wealth()[k], fold, 1e-12 * (1.0 + std::abs(fold)));
    }
}

// The extreme uniform bet busts on x = 1 and stays bust.
TEST(MixtureEngine, BustIsAbsorbing) {
    const MarketConfig cfg = make_market(0.5);
    const PriorSpec prior = make_prior(PriorKind::Uniform, cfg);
    NodeSet nodes = build_nodes(prior, cfg, 16);
    nodes.lambda.back() = cfg.lambda_max;
    MixtureEngine engine(prior, cfg, std::make_shared<const NodeSet>(nodes));
    engine.step(1.0);
    EXPECT_EQ(engine.node_log_wealth().back(), -kInf);
    engine.step(0.0);
    EXPECT_EQ(engine.node_log_wealth().back(), -kInf);
    EXPECT_TRUE(std::isfinite(engine.log_mixture_wealth()));
}

TEST(MixtureEngine, RejectsOutOfRange) {
    const MarketConfig cfg = make_market(0.5);
    MixtureEngine engine(make_prior(PriorKind::Uniform, cfg), cfg, 16);
    EXPECT_THROW(engine.step(1.01), std::domain_error);
    EXPECT_EQ(engine.n(), 0u);
}

TEST(MixtureEngine, RunningSupremumIsMonotone) {
    const MarketConfig cfg = make_market(0.5);
    MixtureEngine engine(make_prior(PriorKind::Robbins, cfg), cfg, 256);
    std::mt19937_64 rng(4);
    std::bernoulli_distribution coin(0.6);
    LogWealth previous = engine.running_max_log_mixture();
    LogWealth true_max = engine.log_mixture_wealth();
    for (int i = 0; i < 2000; ++i) {
        engine.step(coin(rng) ? 1.0 : 0.0);
        true_max = std::max(true_max, engine.log_mixture_wealth());
        EXPECT_GE(engine.running_max_log_mixture(), previous);
        previous = engine.running_max_log_mixture();
    }
    EXPECT_EQ(engine.running_max_log_mixture(), true_max);
}

TEST(VilleState, Examples) {
    const MarketConfig cfg = make_market(0.5);
    MixtureEngine engine(make_prior(PriorKind::Uniform, cfg), cfg, 128);
    VilleState state = engine.ville_state(0.05);
    EXPECT_TRUE(state.inside);
    EXPECT_NEAR(state.sup_log_wealth, 0.0, 1e-12);  // the quadrature mass of the prior
    // Thirty ones drive the wealth above 20; thirty zeros bring it back below, but the sup stays.
    for (int i = 0; i < 30; ++i) engine.step(1.0);
    EXPECT_FALSE(engine.ville_state(0.05).inside);
    for (int i = 0; i < 30; ++i) engine.step(0.0);
    EXPECT_LT(engine.log_mixture_wealth(), std::log(20.0));
    EXPECT_FALSE(engine.ville_state(0.05).inside);
    EXPECT_THROW(engine.ville_state(1.0), std::domain_error);
    EXPECT_THROW(engine.ville_state(0.0), std::domain_error);
}

TEST(VilleState, RequiresTracking) {
    const MarketConfig cfg = make_market(0.5);
    const PriorSpec prior = make_prior(PriorKind::Uniform, cfg);
    MixtureEngine engine(prior, cfg, make_shared_nodes(prior, cfg, 16), MixtureEngine::Options{false});
    EXPECT_THROW(engine.ville_state(0.1), std::logic_error);
}

// Under a mean-m0 law, the one-step factor sum_k w_k (1 - l_k (x - m0))
// averages to 1.
TEST(MixtureEngine, SupermartingaleSanity) {
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        for (PriorKind kind : {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun}) {
            const NodeSet nodes = build_nodes(make_prior(kind, cfg), cfg, 256);
            const double mass = nodes.mass();
            double mean_bet = 0.0;
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                mean_bet += std::exp(nodes.log_weight[k]) / mass * nodes.lambda[k];
            }
            std::mt19937_64 rng(17);
            std::bernoulli_distribution coin(m0);
            const int draws = 100000;
            double sum = 0.0;
            double sum_sq = 0.0;
            for (int i = 0; i < draws; ++i) {
                const double x = coin(rng) ? 1.0 : 0.0;
                const double factor = 1.0 - mean_bet * (x - m0);
                sum += factor;
                sum_sq += factor * factor;
            }
            const double mean = sum / draws;
            const double se = std::sqrt(std::max(sum_sq / draws - mean * mean, 0.0) / draws);
            EXPECT_LE(std::abs(mean - 1.0), 3.0 * se + 1e-15) << to_string(kind) << " m0=" << m0;
        }
    }
}

TEST(Aggregate, Examples) {
    EXPECT_NEAR(aggregate_log_wealth(0.0, 0.0, 0.5), 0.0, 1e-15);
    EXPECT_NEAR(aggregate_log_wealth(-kInf, 0.0, 0.5), std::log(0.5), 1e-15);
    EXPECT_NEAR(aggregate_log_wealth(std::log(4.0), std::log(2.0), 0.5), std::log(3.0), 1e-15);
    EXPECT_EQ(aggregate_log_wealth(-kInf, -kInf, 0.3), -kInf);
    EXPECT_THROW(aggregate_log_wealth(0.0, 0.0, 1.0), std::domain_error);
    AggregateState state{0.25, std::log(8.0), 0.0};
    EXPECT_NEAR(state.log_wealth(), std::log(2.75), 1e-15);
}

TEST(Aggregate, Dominance) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 50.0);
    for (int i = 0; i < 10000; ++i) {
        const double s0 = 0.001 + 0.998 * unit(rng);
        const double a = normal(rng);
        const double b = normal(rng);
        const double agg = aggregate_log_wealth(a, b, s0);
        EXPECT_GE(agg, std::log(std::min(s0, 1.0 - s0)) + std::max(a, b) - 1e-12);
        EXPECT_GE(agg, std::max(std::log(s0) + a, std::log1p(-s0) + b) - 1e-12);
    }
}

TEST(LogSumExp, Stable) {
    const std::vector<double> a{1000.0, 1000.0, -kInf};
    const std::vector<double> b{0.0, 0.0, 0.0};
    EXPECT_NEAR(log_sum_exp(a, b), 1000.0 + std::log(2.0), 1e-12);
    const std::vector<double> dead{-kInf, -kInf};
    EXPECT_EQ(log_sum_exp(dead, std::vector<double>{0.0, 0.0}), -kInf);
    EXPECT_NEAR(log_add_exp(-1000.0, -1000.0), -1000.0 + std::log(2.0), 1e-12);
    EXPECT_EQ(log_add_exp(-kInf, 3.0), 3.0);
}

TEST(RefinementGap, Examples) {
    const MarketConfig cfg = make_market(0.5);
    EXPECT_EQ(refinement_gap(make_prior(PriorKind::Robbins, cfg), cfg, std::vector<double>{}), 0.0);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig c = make_market(m0);
        std::vector<double> path(1000);
        for (double& x : path) x = unit(rng);
        EXPECT_LE(refinement_gap(make_prior(PriorKind::Uniform, c), c, path), 1e-8);
    }

    std::bernoulli_distribution coin(0.5);
    std::vector<double> path(10000);
    for (double& x : path) x = coin(rng) ? 1.0 : 0.0;
    EXPECT_LE(refinement_gap(make_prior(PriorKind::Robbins, cfg), cfg, path), 1e-6);
}

}  // namespace
}  // namespace villebet
