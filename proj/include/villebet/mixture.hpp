#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "villebet/core.hpp"
#include "villebet/priors.hpp"

namespace villebet {

/// ln sum_k exp(a_k + b_k); minus infinity when every term is.
/// Both spans must have the same length.
LogWealth log_sum_exp(std::span<const double> a, std::span<const double> b);

/// Plain two-term log-sum-exp.
LogWealth log_add_exp(LogWealth a, LogWealth b) noexcept;

struct VilleState {
    bool inside = true;
    LogWealth sup_log_wealth = 0.0;
};

/// Mixture wealth over fixed prior nodes, updated online in O(K) per
/// observation. Bust nodes stay in place with log-wealth minus infinity.
class MixtureEngine {
public:
    struct Options {
        /// Evaluate the mixture after every step to maintain the running
        /// supremum. Long runs that only need end-point values turn it off.
        bool track_supremum = true;
    };

    MixtureEngine(const PriorSpec& prior, const MarketConfig& cfg, std::shared_ptr<const NodeSet> nodes);
    MixtureEngine(const PriorSpec& prior, const MarketConfig& cfg, std::shared_ptr<const NodeSet> nodes,
                  Options options);

    /// Convenience: builds its own node set.
    MixtureEngine(const PriorSpec& prior, const MarketConfig& cfg,
                  std::size_t nodes_per_side = kDefaultNodesPerSide);

    /// Throws std::domain_error unless 0 <= x <= 1.
    void step(double x);

    LogWealth log_mixture_wealth() const;

    /// Requires track_supremum; throws std::logic_error otherwise.
    /// Throws std::domain_error unless 0 < alpha < 1.
    VilleState ville_state(double alpha) const;

    std::uint64_t n() const noexcept { return n_; }
    LogWealth running_max_log_mixture() const noexcept { return running_max_; }
    const PriorSpec& prior() const noexcept { return prior_; }
    const MarketConfig& market() const noexcept { return cfg_; }
    const NodeSet& nodes() const noexcept { return *nodes_; }
    std::span<const double> node_log_wealth() const noexcept { return node_log_wealth_; }

private:
    const std::vector<double>& payoffs_for(double d);

    PriorSpec prior_;
    MarketConfig cfg_;
    std::shared_ptr<const NodeSet> nodes_;
    Options options_;
    std::vector<double> node_log_wealth_;
    std::uint64_t n_ = 0;
    LogWealth running_max_;
    mutable std::uint64_t cached_at_ = UINT64_MAX;
    mutable LogWealth cached_value_ = 0.0;

    // Per-node log payoffs for recently seen centered values; discrete
    // streams hit this every step.
    struct PayoffCacheEntry {
        double d;
        std::vector<double> log_payoff;
    };
    std::vector<PayoffCacheEntry> payoff_cache_;
    std::vector<double> scratch_;
};

/// Log-wealth of s0 W1 + (1 - s0) W2. Throws std::domain_error unless 0 < s0 < 1.
LogWealth aggregate_log_wealth(LogWealth log_w1, LogWealth log_w2, double s0);

/// Running aggregate of two component processes.
struct AggregateState {
    double s0 = 0.5;
    LogWealth log_w1 = 0.0;
    LogWealth log_w2 = 0.0;

    LogWealth log_wealth() const { return aggregate_log_wealth(log_w1, log_w2, s0); }
};

/// |ln W(K nodes) - ln W(2K nodes)| after feeding `path`: the quadrature
/// error certificate used as additive slack on every bound.
double refinement_gap(const PriorSpec& prior, const MarketConfig& cfg, std::span<const double> path,
                      std::size_t nodes_per_side = kDefaultNodesPerSide);

}  // namespace villebet
