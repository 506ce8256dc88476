#include "villebet/hindsight.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace villebet {

namespace {

constexpr double kEndpointNudge = 1e-12;
constexpr int kMaxIterations = 200;

struct SlopeCurvature {
    double slope = 0.0;
    double curvature = 0.0;
};

SlopeCurvature slope_and_curvature(std::span<const WeightedPoint> points, double m0, double lambda) {
    SlopeCurvature out;
    for (const auto& p : points) {
        const double d = p.x - m0;
        if (d == 0.0 || p.count == 0.0) {
            continue;
        }
        const double ratio = d / (1.0 - lambda * d);
        out.slope -= p.count * ratio;
        out.curvature -= p.count * ratio * ratio;
    }
    return out;
}

bool all_centered(std::span<const WeightedPoint> points, double m0) {
    return std::all_of(points.begin(), points.end(),
                       [m0](const WeightedPoint& p) { return p.count == 0.0 || p.x == m0; });
}

}  // namespace

Interval full_comparator(const MarketConfig& cfg) { return {cfg.lambda_min, cfg.lambda_max}; }

Interval restricted_comparator() { return {-1.0, 1.0}; }

std::string_view to_string(Location location) {
    switch (location) {
        case Location::Interior:
            return "Interior";
        case Location::LowerBoundary:
            return "LowerBoundary";
        case Location::UpperBoundary:
            return "UpperBoundary";
        case Location::Degenerate:
            return "Degenerate";
    }
    return "Unknown";
}

LogWealth objective(std::span<const WeightedPoint> points, double m0, double lambda) {
    CompensatedSum total;
    for (const auto& p : points) {
        if (p.count == 0.0) {
            continue;
        }
        const double d = p.x - m0;
        const LogWealth term = log_payoff_centered(lambda, d);
        if (term == kMinusInf) {
            return kMinusInf;
        }
        total.add(p.count * term);
    }
    return total.value();
}

LogWealth objective(const PathState& path, double lambda) { return objective(path.histogram(), path.m0(), lambda); }

double objective_slope(std::span<const WeightedPoint> points, double m0, double lambda) {
    return slope_and_curvature(points, m0, lambda).slope;
}

HindsightResult best_lambda(std::span<const WeightedPoint> points, double m0, const Interval& comparator,
                            std::optional<double> hint) {
    if (!(comparator.lo <= comparator.hi)) {
        throw std::invalid_argument("empty comparator interval");
    }
    if (all_centered(points, m0)) {
        return {0.0, Location::Degenerate, 0.0};
    }
    const auto finish = [&](double lambda, Location location) {
        return HindsightResult{lambda, location, std::max(objective(points, m0, lambda), 0.0)};
    };

    const double width = comparator.hi - comparator.lo;
    // Pull endpoints toward zero so one-sided slopes stay finite at bust bets.
    const double lo_in = comparator.lo * (1.0 - kEndpointNudge);
    const double hi_in = comparator.hi * (1.0 - kEndpointNudge);
    if (objective_slope(points, m0, hi_in) > 0.0) {
        return finish(comparator.hi, Location::UpperBoundary);
    }
    if (objective_slope(points, m0, lo_in) < 0.0) {
        return finish(comparator.lo, Location::LowerBoundary);
    }

    // f' is decreasing: keep f'(a) >= 0 >= f'(b).
    double a = lo_in;
    double b = hi_in;
    double x = hint.value_or(0.0);
    if (!(x > a && x < b)) {
        x = 0.5 * (a + b);
    }
    const double tolerance = kEndpointNudge * width;
    for (int it = 0; it < kMaxIterations; ++it) {
        const auto [slope, curvature] = slope_and_curvature(points, m0, x);
        if (slope == 0.0) {
            break;
        }
        if (slope > 0.0) {
            a = x;
        } else {
            b = x;
        }
        double next = curvature < 0.0 ? x - slope / curvature : 0.5 * (a + b);
        if (!(next > a && next < b)) {
            next = 0.5 * (a + b);
        }
        const double moved = std::abs(next - x);
        x = next;
        if (moved <= 1e-3 * tolerance || b - a <= tolerance) {
            break;
        }
    }
    return finish(x, Location::Interior);
}

HindsightResult best_lambda(const PathState& path, const Interval& comparator, std::optional<double> hint) {
    return best_lambda(path.histogram(), path.m0(), comparator, hint);
}

double klinf(std::span<const WeightedPoint> dist, double m0) {
    double total = 0.0;
    for (const auto& p : dist) {
        if (p.count < 0.0) {
            throw std::invalid_argument("klinf: negative weight");
        }
        if (!(p.x >= 0.0 && p.x <= 1.0)) {
            throw std::invalid_argument("klinf: support point outside [0,1]");
        }
        total += p.count;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("klinf: weights must sum to 1");
    }
    const MarketConfig cfg = make_market(m0);
    return best_lambda(dist, m0, full_comparator(cfg)).log_wstar;
}

double wstar_lower_bound(double s, double v) {
    if (s == 0.0) {
        return 0.0;
    }
    return s * s / (4.0 / 3.0 * std::abs(s) + 2.0 * v);
}

SignConstants sign_constants(double lambda_star, const MarketConfig& cfg) noexcept {
    if (lambda_star >= 0.0) {
        return {1.0 - cfg.m0, cfg.m0};
    }
    return {cfg.m0, 1.0 - cfg.m0};
}

}  // namespace villebet
