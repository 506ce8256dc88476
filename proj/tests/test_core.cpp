#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "villebet/core.hpp"

namespace villebet {
namespace {

TEST(MakeMarket, SymmetricCase) {
    const MarketConfig cfg = make_market(0.5);
    EXPECT_DOUBLE_EQ(cfg.lambda_min, -2.0);
    EXPECT_DOUBLE_EQ(cfg.lambda_max, 2.0);
    EXPECT_DOUBLE_EQ(cfg.beta_l, 0.5);
    EXPECT_DOUBLE_EQ(cfg.beta_u, 0.5);
}

TEST(MakeMarket, AsymmetricCase) {
    const MarketConfig cfg = make_market(0.25);
    EXPECT_DOUBLE_EQ(cfg.lambda_min, -4.0);
    EXPECT_DOUBLE_EQ(cfg.lambda_max, 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(cfg.beta_l, 0.25);
    EXPECT_DOUBLE_EQ(cfg.beta_u, 0.75);
}

TEST(MakeMarket, RejectsBoundaryAndOutside) {
    EXPECT_THROW(make_market(0.0), std::domain_error);
    EXPECT_THROW(make_market(1.0), std::domain_error);
    EXPECT_THROW(make_market(-0.1), std::domain_error);
    EXPECT_THROW(make_market(std::nan("")), std::domain_error);
}

TEST(MakeMarket, InvariantsOnRandomM0) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(1e-6, 1.0 - 1e-6);
    for (int i = 0; i < 1000; ++i) {
        const MarketConfig cfg = make_market(unit(rng));
        EXPECT_LT(cfg.lambda_min, 0.0);
        EXPECT_GT(cfg.lambda_max, 0.0);
        EXPECT_GT(cfg.beta_l, 0.0);
        EXPECT_LE(cfg.beta_l, 0.5);
        EXPECT_GE(cfg.beta_u, 0.5);
        EXPECT_NEAR(cfg.beta_l + cfg.beta_u, 1.0, 1e-15);
        // Every admissible bet keeps every payoff nonnegative.
        for (double y : {0.0, 1.0}) {
            EXPECT_GE(1.0 - cfg.lambda_min * (y - cfg.m0), -1e-12);
            EXPECT_GE(1.0 - cfg.lambda_max * (y - cfg.m0), -1e-12);
        }
    }
}

TEST(PathState, OneStep) {
    PathState path(make_market(0.5));
    path.observe(1.0);
    EXPECT_EQ(path.n(), 1u);
    EXPECT_DOUBLE_EQ(path.s(), 0.5);
    EXPECT_DOUBLE_EQ(path.v(), 0.25);
}

TEST(PathState, HandSumOfCenteredValues) {
    PathState path(make_market(0.5));
    for (double x : {1.0, 1.0, 0.0}) {
        path = observe(path, x);
    }
    EXPECT_DOUBLE_EQ(path.s(), 0.5);
    EXPECT_DOUBLE_EQ(path.v(), 0.75);
    ASSERT_EQ(path.values().size(), 3u);
    ASSERT_EQ(path.histogram().size(), 2u);
}

TEST(PathState, RepeatedNullValueIsDegenerate) {
    PathState path(make_market(0.3));
    for (int i = 0; i < 50; ++i) {
        path.observe(0.3);
    }
    EXPECT_EQ(path.s(), 0.0);
    EXPECT_EQ(path.v(), 0.0);
}

TEST(PathState, RejectsOutOfRange) {
    PathState path(make_market(0.5));
    EXPECT_THROW(path.observe(1.5), std::domain_error);
    EXPECT_THROW(path.observe(-0.01), std::domain_error);
    EXPECT_EQ(path.n(), 0u);
}

TEST(PathState, HistogramOnlyDropsValues) {
    PathState path(make_market(0.5), PathState::Retention::HistogramOnly);
    for (int i = 0; i < 10; ++i) {
        path.observe(i % 2);
    }
    EXPECT_TRUE(path.values().empty());
    ASSERT_EQ(path.histogram().size(), 2u);
    EXPECT_EQ(path.histogram()[0].count + path.histogram()[1].count, 10.0);
}

// Folding observe matches a long-double batch recomputation, and the
// bounds |S| <= n beta_u, V <= n beta_u^2 hold.
TEST(PathState, FoldMatchesBatchRecomputation) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        PathState path(cfg);
        long double s = 0.0L;
        long double v = 0.0L;
        for (int i = 0; i < 100000; ++i) {
            const double x = unit(rng);
            path.observe(x);
            const long double d = static_cast<long double>(x) - m0;
            s += d;
            v += d * d;
        }
        EXPECT_NEAR(path.s(), static_cast<double>(s), 1e-12);
        EXPECT_NEAR(path.v(), static_cast<double>(v), 1e-12);
        EXPECT_LE(std::abs(path.s()), path.n() * cfg.beta_u);
        EXPECT_LE(path.v(), path.n() * cfg.beta_u * cfg.beta_u);
        double hist_s = 0.0;
        for (const auto& p : path.histogram()) {
            hist_s += p.count * (p.x - m0);
        }
        EXPECT_NEAR(hist_s, path.s(), 1e-9);
    }
}

TEST(LogPayoff, Examples) {
    const MarketConfig cfg = make_market(0.5);
    EXPECT_EQ(log_payoff(0.0, 0.3, cfg), 0.0);
    EXPECT_NEAR(log_payoff(-2.0, 1.0, cfg), std::log(2.0), 1e-15);
    EXPECT_EQ(log_payoff(2.0, 1.0, cfg), kMinusInf);
    EXPECT_EQ(log_payoff(-2.0, 0.0, cfg), kMinusInf);
}

TEST(LogPayoff, ExtremeBetsBustExactly) {
    for (double m0 : {0.1, 0.25, 0.3, 0.7, 0.9}) {
        const MarketConfig cfg = make_market(m0);
        EXPECT_EQ(log_payoff(cfg.lambda_max, 1.0, cfg), kMinusInf) << m0;
        EXPECT_EQ(log_payoff(cfg.lambda_min, 0.0, cfg), kMinusInf) << m0;
        EXPECT_TRUE(std::isfinite(log_payoff(cfg.lambda_max, 0.0, cfg)));
        EXPECT_TRUE(std::isfinite(log_payoff(cfg.lambda_min, 1.0, cfg)));
    }
}

TEST(LogPayoff, RejectsOutsideInterval) {
    const MarketConfig cfg = make_market(0.5);
    EXPECT_THROW(log_payoff(2.0001, 0.5, cfg), std::domain_error);
    EXPECT_THROW(log_payoff(-2.5, 0.5, cfg), std::domain_error);
    EXPECT_THROW(log_payoff(0.0, 1.2, cfg), std::domain_error);
}

// ln(1 - beta_u |lambda|) <= log_payoff <= ln(1 + beta_u |lambda|).
TEST(LogPayoff, EnvelopeProperty) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const MarketConfig cfg = make_market(0.01 + 0.98 * unit(rng));
        const double lambda = cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * unit(rng);
        const double x = unit(rng);
        const double lp = log_payoff(lambda, x, cfg);
        const double a = std::abs(lambda);
        EXPECT_LE(lp, std::log1p(cfg.beta_u * a) + 1e-14);
        if (a < 1.0 / cfg.beta_u) {
            EXPECT_GE(lp, std::log1p(-cfg.beta_u * a) - 1e-14);
        }
    }
}

TEST(CompensatedSum, RecoversSmallTerms) {
    CompensatedSum sum;
    sum.add(1.0);
    for (int i = 0; i < 1000000; ++i) {
        sum.add(1e-16);
    }
    EXPECT_NEAR(sum.value(), 1.0 + 1e-10, 1e-15);
}

}  // namespace
}  // namespace villebet
