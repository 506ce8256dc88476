#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "villebet/core.hpp"

namespace villebet {

enum class PriorKind { Uniform, Robbins, OrabonaJun };

std::string_view to_string(PriorKind kind);
/// Accepts "uniform", "robbins", "oj". Throws std::invalid_argument.
PriorKind parse_prior_kind(std::string_view name);

/// A prior over bets. Uniform and Robbins live on the whole admissible
/// interval; the Orabona-Jun prior on the restricted interval [-1,1].
struct PriorSpec {
    PriorKind kind = PriorKind::Uniform;
    double support_lo = -2.0;
    double support_hi = 2.0;
};

PriorSpec make_prior(PriorKind kind, const MarketConfig& cfg);

/// Constants of the heavy-near-zero priors, all built from 6.6e.
namespace heavy {
inline const double kScaleConstant = 6.6 * 2.718281828459045235;  // 6.6e
inline const double kL = std::log(kScaleConstant);                 // ln(6.6e)
inline const double kLL = std::log(kL);                            // ln ln(6.6e)
inline const double kLLL = std::log(kLL);                          // ln ln ln(6.6e)
}  // namespace heavy

/// Prior density at lambda. Zero outside the support. The heavy priors are
/// singular at 0, so lambda == 0 throws std::domain_error for them.
double density(const PriorSpec& prior, double lambda, const MarketConfig& cfg);

/// Exact total mass: 1 (Uniform), 1/2 (Robbins, as printed), 1 (OJ).
double total_mass(const PriorSpec& prior, const MarketConfig& cfg);

/// Closed-form prior mass of [0, lambda] (lambda > 0) or [lambda, 0]
/// (lambda < 0), clipped to the support.
double radial_mass(const PriorSpec& prior, double lambda, const MarketConfig& cfg);

/// Scale used by a heavy prior on the side of `lambda`: 1-m0 (positive
/// Robbins side), m0 (negative Robbins side), 1 (OJ).
double heavy_scale(const PriorSpec& prior, double lambda, const MarketConfig& cfg);

/// Uniformizing coordinate s = 1 / ln ln(6.6e / (scale |lambda|)) of the
/// heavy priors, in (0, 1/ln ln(6.6e)]; and its inverse for s > 0.
double heavy_s_of_lambda(double abs_lambda, double scale);
double heavy_lambda_of_s(double s, double scale);

/// Fixed quadrature nodes for a prior: W_n ~ sum_k exp(log_weight_k) W_n(lambda_k).
struct NodeSet {
    std::vector<double> lambda;
    std::vector<double> log_weight;
    std::size_t side_count = 0;

    std::size_t size() const noexcept { return lambda.size(); }
    double mass() const;
};

/// Default nodes per sign side.
inline constexpr std::size_t kDefaultNodesPerSide = 2048;

/// Builds K nodes per sign side. Throws std::invalid_argument for K < 16.
///
/// Uniform: a tanh-sinh rule on [lambda_min, 0] and on [0, lambda_max], so
/// nodes cluster both at the bust boundaries and at zero.
/// Robbins/OJ: under s the prior is exactly uniform with density
/// ln ln(6.6e)/4 (Robbins) or ln ln(6.6e)/2 (OJ) per side. One node carries
/// the mass of s <= s_lo, where scale*|lambda| <= 1e-30 and every payoff is 1
/// to double precision; the remaining K-1 nodes are a tanh-sinh rule in s on
/// [s_lo, s_max], clustering at the outer boundary.
NodeSet build_nodes(const PriorSpec& prior, const MarketConfig& cfg,
                    std::size_t nodes_per_side = kDefaultNodesPerSide);

std::shared_ptr<const NodeSet> make_shared_nodes(const PriorSpec& prior, const MarketConfig& cfg,
                                                 std::size_t nodes_per_side = kDefaultNodesPerSide);

}  // namespace villebet
