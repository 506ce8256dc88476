#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

namespace villebet {

/// Log-domain wealth. Dead wealth (an exact zero) is minus infinity.
using LogWealth = double;

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// The null mean m0 and the admissible bet interval [-1/m0, 1/(1-m0)].
struct MarketConfig {
    double m0 = 0.5;
    double lambda_min = -2.0;
    double lambda_max = 2.0;
    double beta_l = 0.5;  // min{m0, 1-m0}
    double beta_u = 0.5;  // max{m0, 1-m0}

    bool admissible(double lambda) const noexcept {
        return lambda >= lambda_min && lambda <= lambda_max;
    }
};

/// Throws std::domain_error unless 0 < m0 < 1.
MarketConfig make_market(double m0);

/// A value that occurs `count` times on the path (or has probability
/// `count` when used as a weighted distribution).
struct WeightedPoint {
    double x = 0.0;
    double count = 0.0;
};

/// Observed stream with running centered statistics S_n and V_n.
///
/// Besides the raw value sequence the state keeps a value-count histogram,
/// which is what the hindsight objective is evaluated on. For long discrete
/// streams the raw sequence can be dropped (`Retention::HistogramOnly`);
/// the histogram alone determines every statistic used downstream.
class PathState {
public:
    enum class Retention { Full, HistogramOnly };

    explicit PathState(const MarketConfig& cfg, Retention retention = Retention::Full);

    std::uint64_t n() const noexcept { return n_; }
    double s() const noexcept { return s_.value(); }
    double v() const noexcept { return v_.value(); }
    double m0() const noexcept { return m0_; }
    Retention retention() const noexcept { return retention_; }

    /// Empty when retention is HistogramOnly.
    std::span<const double> values() const noexcept { return values_; }
    /// Distinct observed values with multiplicities, in first-seen order.
    std::span<const WeightedPoint> histogram() const noexcept { return histogram_; }

    /// Throws std::domain_error unless 0 <= x <= 1.
    void observe(double x);

private:
    double m0_;
    Retention retention_;
    std::uint64_t n_ = 0;
    CompensatedSum s_;
    CompensatedSum v_;
    std::vector<double> values_;
    std::vector<WeightedPoint> histogram_;
    std::unordered_map<double, std::size_t> histogram_index_;
};

/// Value-semantics form of PathState::observe.
PathState observe(PathState state, double x);

/// ln(1 - lambda (x - m0)); minus infinity when the payoff is exactly zero.
/// Throws std::domain_error for lambda outside the admissible interval or
/// x outside [0,1].
LogWealth log_payoff(double lambda, double x, const MarketConfig& cfg);

/// Unchecked ln(1 - lambda d) for a centered value d; hot-loop form.
inline LogWealth log_payoff_centered(double lambda, double d) noexcept {
    const double payoff = 1.0 - lambda * d;
    if (payoff <= 0.0) {
        return kMinusInf;
    }
    return std::log1p(-lambda * d);
}

}  // namespace villebet
