#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "villebet/core.hpp"
#include "villebet/hindsight.hpp"
#include "villebet/priors.hpp"

namespace villebet {

enum class Branch { SmallDriftInterior, SmallDriftBoundary, MediumDrift, LargeDrift, Degenerate };

std::string_view to_string(Branch branch);

/// ln W* - ln W; plus infinity when the mixture is fully bust.
double regret(LogWealth log_wstar, LogWealth log_mixture);

/// Drift classification for the Robbins bound. `location` is that of the
/// full-interval optimum on the same path.
///   SmallDrift*: |S| < sqrt(2V), split on interior vs boundary optimum
///   MediumDrift: sqrt(2V) <= |S| <= (beta_l/5) V
///   LargeDrift:  sqrt(2V) <= |S| and (beta_l/5) V < |S|
///   Degenerate:  V = 0
Branch classify(double s, double v, Location location, const MarketConfig& cfg);

/// The same split for the Orabona-Jun bound: thresholds use V/5 and the
/// boundary is |lambda*| = 1 on the restricted comparator.
Branch classify_oj(double s, double v, Location restricted_location);

/// ln(1+n) + 1.
double uniform_bound(std::uint64_t n);

/// Path-wise regret bound of the Robbins mixture for the given branch.
/// Empty for Degenerate.
std::optional<double> robbins_bound(Branch branch, double s, double v, double log_wstar, const MarketConfig& cfg);

/// Bound valid on paths that stay inside the Ville event of level alpha.
/// Defined for MediumDrift and LargeDrift only (empty otherwise); the sign
/// dependent constant is replaced by its worst case beta_l.
/// Throws std::domain_error unless 0 < alpha < 1.
std::optional<double> robbins_conditional_bound(Branch branch, double s, double v, double alpha,
                                                const MarketConfig& cfg);

/// (1/2) ln W* - ln(pi(lambda*) |lambda*|). Empty when lambda* = 0.
std::optional<double> lemma_a1_bound(double log_wstar, double lambda_star, const PriorSpec& prior,
                                     const MarketConfig& cfg);

/// The quadratic-neighbourhood bound for an interior optimum, with
/// rho = min{|lambda*|, (1 - alpha_n |lambda*|)/sqrt(1+V)}:
///   rho^2 V / (2 (1 - alpha_n |lambda*|)^2) - ln(min{rho, |lambda*|} pi(lambda*)).
/// Empty unless the optimum is interior and nonzero.
std::optional<double> lemma_a2_bound(const HindsightResult& hindsight, double v, const PriorSpec& prior,
                                     const MarketConfig& cfg);

/// Orabona-Jun density at |lambda| = 1.
double oj_density_at_one();

/// Path-wise regret bound of the Orabona-Jun mixture against the best bet
/// in [-1,1]. Empty for Degenerate.
std::optional<double> oj_bound(Branch branch, double s, double v, double log_wstar_restricted);

/// min(r1, r2) + ln(1 / min{s0, 1-s0}). Throws std::domain_error unless 0 < s0 < 1.
double aggregate_bound(double r1, double r2, double s0);

struct RegretReport {
    std::uint64_t n = 0;
    double s = 0.0;
    double v = 0.0;
    Branch branch = Branch::Degenerate;
    double regret = 0.0;
    std::optional<double> bound;
    std::optional<double> conditional_bound;
    double quad_slack = 0.0;

    /// bound - regret, when a bound applies.
    std::optional<double> slack() const;
    /// slack < -(quad_slack + 1e-8).
    bool violated() const;
};

/// Additive tolerance on top of the quadrature certificate.
inline constexpr double kBoundTolerance = 1e-8;

/// Checks the structural facts about the hindsight optimum against (S, V):
/// sign and sandwich for interior optima, the ratio bound for boundary
/// optima, the medium-drift envelope, and ln W* >= S^2/((4/3)|S| + 2V) for
/// both comparators. Returns the names of the facts that fail.
std::vector<std::string_view> envelope_violations(double s, double v, const HindsightResult& full,
                                                  double log_wstar_restricted, const MarketConfig& cfg);

}  // namespace villebet
