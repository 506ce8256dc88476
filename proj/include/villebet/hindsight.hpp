#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "villebet/core.hpp"

namespace villebet {

/// Closed comparator interval of bets.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// The full admissible interval [-1/m0, 1/(1-m0)].
Interval full_comparator(const MarketConfig& cfg);
/// The restricted comparator [-1, 1].
Interval restricted_comparator();

enum class Location { Interior, LowerBoundary, UpperBoundary, Degenerate };

std::string_view to_string(Location location);

struct HindsightResult {
    double lambda_star = 0.0;
    Location location = Location::Degenerate;
    double log_wstar = 0.0;

    bool on_boundary() const noexcept {
        return location == Location::LowerBoundary || location == Location::UpperBoundary;
    }
};

/// f(lambda) = sum_j count_j ln(1 - lambda (x_j - m0)).
LogWealth objective(std::span<const WeightedPoint> points, double m0, double lambda);
LogWealth objective(const PathState& path, double lambda);

/// f'(lambda).
double objective_slope(std::span<const WeightedPoint> points, double m0, double lambda);

/// Maximizes the concave objective over `comparator`.
///
/// Endpoints are classified by the sign of f' just inside them; otherwise
/// the stationary point is found by Newton steps kept inside a shrinking
/// sign bracket. A path with V = 0 is Degenerate with lambda* = 0.
/// `hint` seeds the search (e.g. the previous step's optimum).
HindsightResult best_lambda(std::span<const WeightedPoint> points, double m0, const Interval& comparator,
                            std::optional<double> hint = std::nullopt);
HindsightResult best_lambda(const PathState& path, const Interval& comparator,
                            std::optional<double> hint = std::nullopt);

/// KL_inf(Q, m0) through its dual: the best expected log payoff. `dist`
/// weights must be nonnegative and sum to 1 (std::invalid_argument).
double klinf(std::span<const WeightedPoint> dist, double m0);

/// S^2 / ((4/3)|S| + 2V), a lower bound on ln W*; 0 when S = V = 0.
double wstar_lower_bound(double s, double v);

/// The sign-dependent constants of the hindsight optimum:
/// alpha_n = 1-m0 and beta_n = m0 when lambda* > 0, swapped when lambda* < 0.
/// lambda* = 0 takes the positive-side values.
struct SignConstants {
    double alpha_n = 0.5;
    double beta_n = 0.5;
};

SignConstants sign_constants(double lambda_star, const MarketConfig& cfg) noexcept;

}  // namespace villebet
