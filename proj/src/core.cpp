#include "villebet/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace villebet {

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        carry_ += (sum_ - t) + x;
    } else {
        carry_ += (x - t) + sum_;
    }
    sum_ = t;
}

MarketConfig make_market(double m0) {
    if (!(m0 > 0.0 && m0 < 1.0)) {
        throw std::domain_error("m0 must lie strictly inside (0,1), got " + std::to_string(m0));
    }
    MarketConfig cfg;
    cfg.m0 = m0;
    cfg.lambda_min = -1.0 / m0;
    cfg.lambda_max = 1.0 / (1.0 - m0);
    cfg.beta_l = std::min(m0, 1.0 - m0);
    cfg.beta_u = std::max(m0, 1.0 - m0);
    return cfg;
}

PathState::PathState(const MarketConfig& cfg, Retention retention)
    : m0_(cfg.m0), retention_(retention) {}

void PathState::observe(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("observation must lie in [0,1], got " + std::to_string(x));
    }
    const double d = x - m0_;
    ++n_;
    s_.add(d);
    v_.add(d * d);
    if (retention_ == Retention::Full) {
        values_.push_back(x);
    }
    auto [it, inserted] = histogram_index_.try_emplace(x, histogram_.size());
    if (inserted) {
        histogram_.push_back({x, 1.0});
    } else {
        histogram_[it->second].count += 1.0;
    }
}

PathState observe(PathState state, double x) {
    state.observe(x);
    return state;
}

LogWealth log_payoff(double lambda, double x, const MarketConfig& cfg) {
    if (!cfg.admissible(lambda)) {
        throw std::domain_error("bet " + std::to_string(lambda) + " outside the admissible interval");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("observation must lie in [0,1], got " + std::to_string(x));
    }
    // The only zero payoffs: the extreme bets against the extreme outcome.
    if ((lambda == cfg.lambda_max && x == 1.0) || (lambda == cfg.lambda_min && x == 0.0)) {
        return kMinusInf;
    }
    return log_payoff_centered(lambda, x - cfg.m0);
}

}  // namespace villebet
