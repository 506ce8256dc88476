#include "villebet/regret_bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace villebet {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative and absolute slack for the envelope comparisons.
constexpr double kEnvelopeRel = 1e-9;
constexpr double kEnvelopeAbs = 1e-12;

bool small_drift(double s, double v) { return std::abs(s) < std::sqrt(2.0 * v); }

// ln ln z + 2 ln ln ln z with the leading coefficient `c1` and trailing `c2`.
double iterated_logs(double z, double c1, double c2) {
    const double ll = std::log(std::log(z));
    return c1 * ll + c2 * std::log(ll);
}

bool leq(double lhs, double rhs) { return lhs <= rhs + kEnvelopeRel * std::abs(rhs) + kEnvelopeAbs; }

}  // namespace

std::string_view to_string(Branch branch) {
    switch (branch) {
        case Branch::SmallDriftInterior:
            return "SmallDriftInterior";
        case Branch::SmallDriftBoundary:
            return "SmallDriftBoundary";
        case Branch::MediumDrift:
            return "MediumDrift";
        case Branch::LargeDrift:
            return "LargeDrift";
        case Branch::Degenerate:
            return "Degenerate";
    }
    return "Unknown";
}

double regret(LogWealth log_wstar, LogWealth log_mixture) {
    if (log_mixture == kMinusInf) {
        return kInf;
    }
    return log_wstar - log_mixture;
}

Branch classify(double s, double v, Location location, const MarketConfig& cfg) {
    if (v == 0.0) {
        return Branch::Degenerate;
    }
    if (small_drift(s, v)) {
        return location == Location::Interior ? Branch::SmallDriftInterior : Branch::SmallDriftBoundary;
    }
    return std::abs(s) <= cfg.beta_l / 5.0 * v ? Branch::MediumDrift : Branch::LargeDrift;
}

Branch classify_oj(double s, double v, Location restricted_location) {
    if (v == 0.0) {
        return Branch::Degenerate;
    }
    if (small_drift(s, v)) {
        return restricted_location == Location::Interior ? Branch::SmallDriftInterior : Branch::SmallDriftBoundary;
    }
    return std::abs(s) <= v / 5.0 ? Branch::MediumDrift : Branch::LargeDrift;
}

double uniform_bound(std::uint64_t n) { return std::log1p(static_cast<double>(n)) + 1.0; }

std::optional<double> robbins_bound(Branch branch, double s, double v, double log_wstar, const MarketConfig& cfg) {
    using namespace heavy;
    const double bl = cfg.beta_l;
    const double bu = cfg.beta_u;
    switch (branch) {
        case Branch::SmallDriftInterior: {
            const double z = 14.0 * kE * bu / bl * std::sqrt(1.0 + v);
            return 2.0 / (bl * bl) + 1.0 + std::log(8.0 / kLL) + iterated_logs(z, 1.0, 2.0);
        }
        case Branch::SmallDriftBoundary:
            return 1.0 / (bl * bl) - std::log(kLL / (4.0 * kL * kLL * kLL));
        case Branch::MediumDrift: {
            const double z = 14.0 * kE / bl * (1.0 + std::sqrt(v));
            const double abs_s = std::abs(s);
            return 1.0 + std::log(4.0 / kLL) + std::log(20.0 * abs_s / (3.0 * std::sqrt(4.0 / 3.0 * abs_s + 2.0 * v))) +
                   iterated_logs(z, 1.0, 2.0);
        }
        case Branch::LargeDrift:
            return 0.5 * log_wstar + std::log(4.0) + kLL + kLLL + std::log(2.0 * bu + 5.0 / bl);
        case Branch::Degenerate:
            break;
    }
    return std::nullopt;
}

std::optional<double> robbins_conditional_bound(Branch branch, double /*s*/, double v, double alpha,
                                                const MarketConfig& cfg) {
    using namespace heavy;
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("alpha must lie in (0,1)");
    }
    const double bl = cfg.beta_l;
    const double log_inv_alpha = -std::log(alpha);
    if (branch == Branch::MediumDrift) {
        const double z = 14.0 * kE / bl * (1.0 + std::sqrt(v));
        return log_inv_alpha / 3.0 + 4.0 / 3.0 + 4.0 / 3.0 * std::log(20.0 / 3.0) + 4.0 / 3.0 * std::log(4.0 / kLL) +
               iterated_logs(z, 4.0 / 3.0, 8.0 / 3.0);
    }
    if (branch == Branch::LargeDrift) {
        return log_inv_alpha + 2.0 * (std::log(4.0) + kLL + kLLL + std::log(2.0 * cfg.beta_u + 5.0 / bl));
    }
    return std::nullopt;
}

std::optional<double> lemma_a1_bound(double log_wstar, double lambda_star, const PriorSpec& prior,
                                     const MarketConfig& cfg) {
    if (lambda_star == 0.0) {
        return std::nullopt;
    }
    return 0.5 * log_wstar - std::log(density(prior, lambda_star, cfg) * std::abs(lambda_star));
}

std::optional<double> lemma_a2_bound(const HindsightResult& hindsight, double v, const PriorSpec& prior,
                                     const MarketConfig& cfg) {
    const double lambda = hindsight.lambda_star;
    if (hindsight.location != Location::Interior || lambda == 0.0) {
        return std::nullopt;
    }
    const double abs_lambda = std::abs(lambda);
    const double margin = 1.0 - sign_constants(lambda, cfg).alpha_n * abs_lambda;
    const double rho = std::min(abs_lambda, margin / std::sqrt(1.0 + v));
    return rho * rho * v / (2.0 * margin * margin) -
           std::log(std::min(rho, abs_lambda) * density(prior, lambda, cfg));
}

double oj_density_at_one() { return 1.0 / (2.0 * heavy::kL * heavy::kLL); }

std::optional<double> oj_bound(Branch branch, double s, double v, double log_wstar_restricted) {
    using namespace heavy;
    switch (branch) {
        case Branch::SmallDriftInterior:
            return 6.0 + std::log(2.0 / kLL) + iterated_logs(14.0 * kE * std::sqrt(1.0 + v), 1.0, 2.0);
        case Branch::SmallDriftBoundary:
            return 2.0 - std::log(oj_density_at_one());
        case Branch::MediumDrift: {
            const double abs_s = std::abs(s);
            return std::log(20.0 * std::sqrt(kE) / 3.0) + std::log(2.0 / kLL) +
                   std::log(abs_s / std::sqrt(4.0 / 3.0 * abs_s + 2.0 * v)) +
                   iterated_logs(14.0 * kE * (1.0 + std::sqrt(v)), 1.0, 2.0);
        }
        case Branch::LargeDrift:
            return 0.5 * log_wstar_restricted - std::log(oj_density_at_one() / 7.0);
        case Branch::Degenerate:
            break;
    }
    return std::nullopt;
}

double aggregate_bound(double r1, double r2, double s0) {
    if (!(s0 > 0.0 && s0 < 1.0)) {
        throw std::domain_error("aggregate weight s0 must lie in (0,1)");
    }
    return std::min(r1, r2) - std::log(std::min(s0, 1.0 - s0));
}

std::optional<double> RegretReport::slack() const {
    if (!bound) {
        return std::nullopt;
    }
    return *bound - regret;
}

bool RegretReport::violated() const {
    const auto sl = slack();
    return sl && *sl < -(quad_slack + kBoundTolerance);
}

std::vector<std::string_view> envelope_violations(double s, double v, const HindsightResult& full,
                                                  double log_wstar_restricted, const MarketConfig& cfg) {
    std::vector<std::string_view> out;
    if (full.location == Location::Degenerate) {
        return out;
    }
    const double lambda = full.lambda_star;
    const double abs_lambda = std::abs(lambda);
    const double abs_s = std::abs(s);
    const auto [alpha_n, beta_n] = sign_constants(lambda, cfg);
    const bool resolvable_sign = abs_lambda > kEnvelopeAbs && abs_s > kEnvelopeAbs * (1.0 + v);

    if (resolvable_sign && lambda * s > 0.0) {
        out.push_back("opposite_sign");
    }
    if (full.location == Location::Interior) {
        const double ratio = abs_s / v;
        const double lo = ratio * (1.0 - alpha_n * abs_lambda) * (1.0 - alpha_n * abs_lambda);
        const double hi = ratio * (1.0 + beta_n * abs_lambda) * (1.0 + beta_n * abs_lambda);
        if (!leq(lo, abs_lambda) || !leq(abs_lambda, hi)) {
            out.push_back("interior_sandwich");
        }
        if (!leq(abs_s / (v + 2.0 * alpha_n * abs_s), abs_lambda)) {
            out.push_back("interior_lower");
        }
    } else {
        const double outer = std::max(1.0 / cfg.m0, 1.0 / (1.0 - cfg.m0));
        if (abs_s == 0.0 || !leq(v / abs_s, abs_lambda) || !leq(abs_lambda, outer)) {
            out.push_back("boundary_ratio");
        }
    }
    if (classify(s, v, full.location, cfg) == Branch::MediumDrift) {
        const double ratio = abs_s / v;
        if (full.location != Location::Interior || !leq(abs_lambda, ratio + 5.0 * beta_n * ratio * ratio)) {
            out.push_back("medium_drift");
        }
    }
    const double floor = wstar_lower_bound(s, v);
    if (!leq(floor, full.log_wstar)) {
        out.push_back("wstar_lower");
    }
    if (!leq(floor, log_wstar_restricted)) {
        out.push_back("wstar_lower_restricted");
    }
    return out;
}

}  // namespace villebet
