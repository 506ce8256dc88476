#include "villebet/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace villebet {

namespace {
constexpr std::size_t kPayoffCacheSize = 8;
}

MixtureEngine::MixtureEngine(const PriorSpec& prior, const MarketConfig& cfg, std::shared_ptr<const NodeSet> nodes)
    : MixtureEngine(prior, cfg, std::move(nodes), Options{}) {}

MixtureEngine::MixtureEngine(const PriorSpec& prior, const MarketConfig& cfg, std::shared_ptr<const NodeSet> nodes,
                             Options options)
    : prior_(prior), cfg_(cfg), nodes_(std::move(nodes)), options_(options) {
    if (!nodes_) {
        throw std::invalid_argument("MixtureEngine requires a node set");
    }
    node_log_wealth_.assign(nodes_->size(), 0.0);
    running_max_ = log_mixture_wealth();
}

MixtureEngine::MixtureEngine(const PriorSpec& prior, const MarketConfig& cfg, std::size_t nodes_per_side)
    : MixtureEngine(prior, cfg, make_shared_nodes(prior, cfg, nodes_per_side)) {}

const std::vector<double>& MixtureEngine::payoffs_for(double d) {
    for (const auto& entry : payoff_cache_) {
        if (entry.d == d) {
            return entry.log_payoff;
        }
    }
    std::vector<double>* out = &scratch_;
    if (payoff_cache_.size() < kPayoffCacheSize) {
        payoff_cache_.push_back({d, {}});
        out = &payoff_cache_.back().log_payoff;
    }
    const auto& lambda = nodes_->lambda;
    out->resize(lambda.size());
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        (*out)[k] = log_payoff_centered(lambda[k], d);
    }
    return *out;
}

void MixtureEngine::step(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("observation must lie in [0,1], got " + std::to_string(x));
    }
    const double d = x - cfg_.m0;
    ++n_;
    if (d != 0.0) {
        const auto& lp = payoffs_for(d);
        double* lw = node_log_wealth_.data();
        const double* inc = lp.data();
        const std::size_t size = node_log_wealth_.size();
        for (std::size_t k = 0; k < size; ++k) {
            lw[k] += inc[k];
        }
    } else if (cached_at_ == n_ - 1) {
        cached_at_ = n_;  // every payoff is 1: the mixture is unchanged
    }
    if (options_.track_supremum) {
        running_max_ = std::max(running_max_, log_mixture_wealth());
    }
}

LogWealth MixtureEngine::log_mixture_wealth() const {
    if (cached_at_ != n_) {
        cached_value_ = log_sum_exp(node_log_wealth_, nodes_->log_weight);
        cached_at_ = n_;
    }
    return cached_value_;
}

VilleState MixtureEngine::ville_state(double alpha) const {
    if (!options_.track_supremum) {
        throw std::logic_error("ville_state needs an engine that tracks its running supremum");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("alpha must lie in (0,1)");
    }
    return {running_max_ <= std::log(1.0 / alpha), running_max_};
}

LogWealth aggregate_log_wealth(LogWealth log_w1, LogWealth log_w2, double s0) {
    if (!(s0 > 0.0 && s0 < 1.0)) {
        throw std::domain_error("aggregate weight s0 must lie in (0,1)");
    }
    return log_add_exp(std::log(s0) + log_w1, std::log1p(-s0) + log_w2);
}

double refinement_gap(const PriorSpec& prior, const MarketConfig& cfg, std::span<const double> path,
                      std::size_t nodes_per_side) {
    const MixtureEngine::Options quiet{.track_supremum = false};
    MixtureEngine coarse(prior, cfg, make_shared_nodes(prior, cfg, nodes_per_side), quiet);
    MixtureEngine fine(prior, cfg, make_shared_nodes(prior, cfg, 2 * nodes_per_side), quiet);
    for (double x : path) {
        coarse.step(x);
        fine.step(x);
    }
    const LogWealth a = coarse.log_mixture_wealth();
    const LogWealth b = fine.log_mixture_wealth();
    if (a == kMinusInf && b == kMinusInf) {
        return 0.0;
    }
    return std::abs(a - b);
}

}  // namespace villebet
