#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

#include "villebet/priors.hpp"

namespace villebet {
namespace {

constexpr double kE = 2.718281828459045235;

// The heavy profile written out independently of the library constants.
double robbins_reference(double lambda, double m0) {
    const double c = 6.6 * kE;
    const double scale = lambda > 0 ? 1.0 - m0 : m0;
    const double a = std::abs(lambda);
    const double u = std::log(c / (scale * a));
    return std::log(std::log(c)) / (4.0 * a * u * std::pow(std::log(u), 2));
}

TEST(Density, Examples) {
    const MarketConfig cfg = make_market(0.5);
    const PriorSpec uniform = make_prior(PriorKind::Uniform, cfg);
    const PriorSpec robbins = make_prior(PriorKind::Robbins, cfg);
    const PriorSpec oj = make_prior(PriorKind::OrabonaJun, cfg);
    EXPECT_DOUBLE_EQ(density(uniform, -1.3, cfg), 0.25);
    EXPECT_DOUBLE_EQ(density(uniform, 2.0, cfg), 0.25);
    // ln(6.6e) = 2.8870696, ln ln(6.6e) = 1.0602420.
    EXPECT_NEAR(density(robbins, 2.0, cfg), 1.0 / (8.0 * 2.8870696490 * 1.0602420254), 1e-10);
    EXPECT_NEAR(density(robbins, 2.0, cfg), 0.0408364, 1e-7);
    EXPECT_NEAR(density(oj, 1.0, cfg), 0.1633457, 1e-7);
    EXPECT_NEAR(density(oj, -1.0, cfg), 0.1633457, 1e-7);
}

TEST(Density, MatchesIndependentFormula) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        const PriorSpec robbins = make_prior(PriorKind::Robbins, cfg);
        for (int i = 0; i < 200; ++i) {
            const double lambda = cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * unit(rng);
            EXPECT_NEAR(density(robbins, lambda, cfg), robbins_reference(lambda, m0),
                        1e-13 * robbins_reference(lambda, m0));
        }
    }
}

TEST(Density, SupportAndSingularity) {
    const MarketConfig cfg = make_market(0.5);
    const PriorSpec robbins = make_prior(PriorKind::Robbins, cfg);
    const PriorSpec oj = make_prior(PriorKind::OrabonaJun, cfg);
    EXPECT_THROW(density(robbins, 0.0, cfg), std::domain_error);
    EXPECT_THROW(density(oj, 0.0, cfg), std::domain_error);
    EXPECT_EQ(density(oj, 1.5, cfg), 0.0);
    EXPECT_EQ(density(robbins, 2.5, cfg), 0.0);
    EXPECT_EQ(density(make_prior(PriorKind::Uniform, cfg), -2.1, cfg), 0.0);
}

TEST(Density, RadiallyDecreasing) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        for (PriorKind kind : {PriorKind::Robbins, PriorKind::OrabonaJun}) {
            const PriorSpec prior = make_prior(kind, cfg);
            for (int i = 0; i < 1000; ++i) {
                const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
                const double edge = sign > 0 ? prior.support_hi : -prior.support_lo;
                double a = edge * std::pow(unit(rng), 4.0);
                double b = edge * std::pow(unit(rng), 4.0);
                if (a == 0.0 || b == 0.0) continue;
                if (a > b) std::swap(a, b);
                EXPECT_GE(density(prior, sign * a, cfg), density(prior, sign * b, cfg));
            }
        }
    }
}

TEST(TotalMass, ClosedForms) {
    for (double m0 : {0.1, 0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        EXPECT_NEAR(total_mass(make_prior(PriorKind::Uniform, cfg), cfg), 1.0, 1e-15);
        EXPECT_NEAR(total_mass(make_prior(PriorKind::Robbins, cfg), cfg), 0.5, 1e-15);
        EXPECT_NEAR(total_mass(make_prior(PriorKind::OrabonaJun, cfg), cfg), 1.0, 1e-15);
    }
}

// Each heavy side has mass 1/4 (Robbins) or 1/2 (OJ). A fifth of the mass
// sits below |lambda| = 1e-300, so the check integrates the independent
// reference profile in w = ln ln(6.6e / (scale |lambda|)), where it reads
// ln ln(6.6e) / (k w^2) on [ln ln(6.6e), inf).
TEST(TotalMass, AgreesWithAdaptiveQuadrature) {
    const double c = 6.6 * kE;
    boost::math::quadrature::exp_sinh<double> rule;
    const double profile = rule.integrate(
        [&](double t) {
            const double w = std::log(std::log(c)) + t;
            return std::log(std::log(c)) / (w * w);
        },
        1e-14);
    EXPECT_NEAR(profile / 4.0, 0.25, 1e-12);
    EXPECT_NEAR(profile / 2.0, 0.5, 1e-12);
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        EXPECT_NEAR(total_mass(make_prior(PriorKind::Robbins, cfg), cfg), 2.0 * profile / 4.0, 1e-12);
        EXPECT_NEAR(total_mass(make_prior(PriorKind::OrabonaJun, cfg), cfg), 2.0 * profile / 2.0, 1e-12);
    }
}

// Mass of sign * [a, b] by Gauss-Kronrod in ln|lambda|, where the profile is smooth.
double integrate_log(const PriorSpec& prior, const MarketConfig& cfg, double a, double b, double sign) {
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) {
            const double x = std::exp(t);
            return density(prior, sign * x, cfg) * x;
        },
        std::log(a), std::log(b), 15, 1e-15);
}

// Quadrature of the density over [a, b] equals the closed-form mass difference.
TEST(RadialMass, SubstitutionCorrectness) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        for (PriorKind kind : {PriorKind::Robbins, PriorKind::OrabonaJun}) {
            const PriorSpec prior = make_prior(kind, cfg);
            for (int i = 0; i < 50; ++i) {
                double a = prior.support_hi * std::pow(unit(rng), 3.0);
                double b = prior.support_hi * std::pow(unit(rng), 3.0);
                if (a > b) std::swap(a, b);
                if (a <= 0.0 || b - a < 1e-12) continue;
                const double pos = integrate_log(prior, cfg, a, b, 1.0);
                const double neg = integrate_log(prior, cfg, a, std::min(b, -prior.support_lo), -1.0);
                EXPECT_NEAR(pos, radial_mass(prior, b, cfg) - radial_mass(prior, a, cfg), 1e-12);
                EXPECT_NEAR(neg,
                            radial_mass(prior, -std::min(b, -prior.support_lo), cfg) - radial_mass(prior, -a, cfg),
                            1e-12);
            }
        }
    }
}

TEST(HeavyCoordinate, RoundTripAndMonotone) {
    for (double scale : {0.25, 0.5, 0.75, 1.0}) {
        double previous = 0.0;
        const double s_max = 1.0 / heavy::kLL;
        for (int i = 1; i <= 1000; ++i) {
            const double s = s_max * i / 1000.0;
            const double lambda = heavy_lambda_of_s(s, scale);
            // Small s underflows to lambda = 0; past that the map is strictly increasing.
            EXPECT_GE(lambda, previous);
            if (previous > 0.0) EXPECT_GT(lambda, previous);
            EXPECT_LE(lambda, 1.0 / scale * (1.0 + 1e-15));
            previous = lambda;
            if (lambda > 1e-300) {
                EXPECT_NEAR(heavy_s_of_lambda(lambda, scale), s, 1e-12);
            }
        }
        EXPECT_NEAR(heavy_lambda_of_s(s_max, scale), 1.0 / scale, 1e-15);
    }
}

TEST(BuildNodes, MassMatchesTotal) {
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        for (PriorKind kind : {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun}) {
            const PriorSpec prior = make_prior(kind, cfg);
            for (std::size_t k : {16u, 64u, 2048u, 4096u}) {
                const NodeSet nodes = build_nodes(prior, cfg, k);
                EXPECT_EQ(nodes.size(), 2 * k);
                // At K = 16 the rule integrates the constant to about 3e-7.
                const double tol = k == 16 ? 1e-6 : 1e-9;
                EXPECT_NEAR(nodes.mass(), total_mass(prior, cfg), tol) << to_string(kind) << " K=" << k;
            }
        }
    }
}

TEST(BuildNodes, DoublingKLeavesMassUnchanged) {
    const MarketConfig cfg = make_market(0.3);
    for (PriorKind kind : {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun}) {
        const PriorSpec prior = make_prior(kind, cfg);
        EXPECT_NEAR(build_nodes(prior, cfg, 512).mass(), build_nodes(prior, cfg, 1024).mass(), 1e-9);
    }
}

TEST(BuildNodes, NodesStrictlyInsideSupportAndNonzero) {
    for (double m0 : {0.25, 0.5, 0.7}) {
        const MarketConfig cfg = make_market(m0);
        for (PriorKind kind : {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun}) {
            const PriorSpec prior = make_prior(kind, cfg);
            const NodeSet nodes = build_nodes(prior, cfg, 256);
            for (double lambda : nodes.lambda) {
                EXPECT_GT(lambda, prior.support_lo);
                EXPECT_LT(lambda, prior.support_hi);
                EXPECT_NE(lambda, 0.0);
            }
            EXPECT_TRUE(std::is_sorted(nodes.lambda.begin(), nodes.lambda.begin() + 256, std::greater<>()) ||
                        std::is_sorted(nodes.lambda.begin(), nodes.lambda.begin() + 256));
            for (double lw : nodes.log_weight) {
                EXPECT_TRUE(std::isfinite(lw));
            }
        }
    }
}

TEST(BuildNodes, RejectsTooFewNodes) {
    const MarketConfig cfg = make_market(0.5);
    EXPECT_THROW(build_nodes(make_prior(PriorKind::Robbins, cfg), cfg, 15), std::invalid_argument);
}

TEST(PriorKind, ParseAndPrint) {
    for (PriorKind kind : {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun}) {
        EXPECT_EQ(parse_prior_kind(to_string(kind)), kind);
    }
    EXPECT_THROW(parse_prior_kind("gaussian"), std::invalid_argument);
}

}  // namespace
}  // namespace villebet
