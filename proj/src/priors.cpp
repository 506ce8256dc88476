#include "villebet/priors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace villebet {

namespace {

// scale * |lambda| assigned to the lumped innermost node of a heavy prior.
constexpr double kInnerFloor = 1e-30;
// Half-width of the tanh-sinh parameter range; the outermost node sits about
// 1e-15 (relative) inside the interval.
constexpr double kTanhSinhHalfRange = 3.1;

bool is_heavy(PriorKind kind) { return kind != PriorKind::Uniform; }

// Per-side mass density in s: ln ln(6.6e)/4 (Robbins) or /2 (OJ).
double s_density(PriorKind kind) {
    return kind == PriorKind::Robbins ? heavy::kLL / 4.0 : heavy::kLL / 2.0;
}

struct TanhSinhNode {
    double from_lo;  // distance of the node from the lower end, in units of the half-width
    double from_hi;  // distance from the upper end, same units
    double weight;   // weight in units of the half-width
};

// Nodes of the truncated tanh-sinh rule on [-1, 1]. Both endpoint distances
// are formed without cancellation so nodes near either end keep full
// relative precision.
std::vector<TanhSinhNode> tanh_sinh_rule(std::size_t count) {
    std::vector<TanhSinhNode> rule;
    rule.reserve(count);
    const double h = 2.0 * kTanhSinhHalfRange / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = -kTanhSinhHalfRange + h * static_cast<double>(i);
        const double u = 0.5 * std::numbers::pi * std::sinh(t);
        const double q = std::exp(-2.0 * std::abs(u));
        const double near = 2.0 * q / (1.0 + q);  // 1 - |tanh u|
        const double far = 2.0 - near;
        const double weight = h * 0.5 * std::numbers::pi * std::cosh(t) * 4.0 * q / ((1.0 + q) * (1.0 + q));
        if (u < 0.0) {
            rule.push_back({near, far, weight});
        } else {
            rule.push_back({far, near, weight});
        }
    }
    return rule;
}

void append_uniform_side(NodeSet& nodes, double lo, double hi, double dens, std::size_t count) {
    const double half = 0.5 * (hi - lo);
    for (const auto& node : tanh_sinh_rule(count)) {
        const double lambda = node.from_lo <= node.from_hi ? lo + half * node.from_lo : hi - half * node.from_hi;
        nodes.lambda.push_back(lambda);
        nodes.log_weight.push_back(std::log(dens * half * node.weight));
    }
}

// sign = +1 for the positive side, -1 for the negative side.
void append_heavy_side(NodeSet& nodes, PriorKind kind, double scale, double sign, std::size_t count) {
    const double dens = s_density(kind);
    const double s_max = 1.0 / heavy::kLL;
    const double s_lo = heavy_s_of_lambda(kInnerFloor / scale, scale);

    nodes.lambda.push_back(sign * kInnerFloor / scale);
    nodes.log_weight.push_back(std::log(dens * s_lo));

    const double half = 0.5 * (s_max - s_lo);
    for (const auto& node : tanh_sinh_rule(count - 1)) {
        const double gap = half * node.from_hi;  // s_max - s
        const double s = node.from_lo <= node.from_hi ? s_lo + half * node.from_lo : s_max - gap;
        // lambda(s) = (1/scale) exp(-ln(6.6e) expm1(1/s - 1/s_max)), exact at s_max.
        const double lambda = std::exp(-heavy::kL * std::expm1(gap / (s * s_max))) / scale;
        nodes.lambda.push_back(sign * lambda);
        nodes.log_weight.push_back(std::log(dens * half * node.weight));
    }
}

}  // namespace

std::string_view to_string(PriorKind kind) {
    switch (kind) {
        case PriorKind::Uniform:
            return "uniform";
        case PriorKind::Robbins:
            return "robbins";
        case PriorKind::OrabonaJun:
            return "oj";
    }
    return "unknown";
}

PriorKind parse_prior_kind(std::string_view name) {
    if (name == "uniform") return PriorKind::Uniform;
    if (name == "robbins") return PriorKind::Robbins;
    if (name == "oj") return PriorKind::OrabonaJun;
    throw std::invalid_argument("unknown prior '" + std::string(name) + "' (expected uniform|robbins|oj)");
}

PriorSpec make_prior(PriorKind kind, const MarketConfig& cfg) {
    if (kind == PriorKind::OrabonaJun) {
        return {kind, -1.0, 1.0};
    }
    return {kind, cfg.lambda_min, cfg.lambda_max};
}

double heavy_scale(const PriorSpec& prior, double lambda, const MarketConfig& cfg) {
    if (prior.kind == PriorKind::OrabonaJun) {
        return 1.0;
    }
    return lambda > 0.0 ? 1.0 - cfg.m0 : cfg.m0;
}

double heavy_s_of_lambda(double abs_lambda, double scale) {
    return 1.0 / std::log(std::log(heavy::kScaleConstant / (scale * abs_lambda)));
}

double heavy_lambda_of_s(double s, double scale) {
    const double s_max = 1.0 / heavy::kLL;
    return std::exp(-heavy::kL * std::expm1(1.0 / s - 1.0 / s_max)) / scale;
}

double density(const PriorSpec& prior, double lambda, const MarketConfig& cfg) {
    if (lambda < prior.support_lo || lambda > prior.support_hi) {
        return 0.0;
    }
    if (prior.kind == PriorKind::Uniform) {
        return cfg.m0 * (1.0 - cfg.m0);
    }
    if (lambda == 0.0) {
        throw std::domain_error("heavy-near-zero prior density is singular at lambda = 0");
    }
    const double scale = heavy_scale(prior, lambda, cfg);
    const double abs_lambda = std::abs(lambda);
    const double u = std::log(heavy::kScaleConstant / (scale * abs_lambda));
    const double lnu = std::log(u);
    const double denom_factor = prior.kind == PriorKind::Robbins ? 4.0 : 2.0;
    return heavy::kLL / (denom_factor * abs_lambda * u * lnu * lnu);
}

double total_mass(const PriorSpec& prior, const MarketConfig& cfg) {
    switch (prior.kind) {
        case PriorKind::Uniform:
            return cfg.m0 * (1.0 - cfg.m0) * (prior.support_hi - prior.support_lo);
        case PriorKind::Robbins:
        case PriorKind::OrabonaJun:
            // Each side: s-density times s_max = ln ln(6.6e) / k * 1 / ln ln(6.6e).
            return 2.0 * s_density(prior.kind) / heavy::kLL;
    }
    return 0.0;
}

double radial_mass(const PriorSpec& prior, double lambda, const MarketConfig& cfg) {
    if (lambda == 0.0) {
        return 0.0;
    }
    const double edge = lambda > 0.0 ? prior.support_hi : -prior.support_lo;
    const double abs_lambda = std::min(std::abs(lambda), edge);
    if (prior.kind == PriorKind::Uniform) {
        return cfg.m0 * (1.0 - cfg.m0) * abs_lambda;
    }
    const double scale = heavy_scale(prior, lambda, cfg);
    // Antiderivative of the radial profile is -1/ln v with v = ln(6.6e/(scale |lambda|)).
    return s_density(prior.kind) * heavy_s_of_lambda(abs_lambda, scale);
}

double NodeSet::mass() const {
    double total = 0.0;
    for (double lw : log_weight) {
        total += std::exp(lw);
    }
    return total;
}

NodeSet build_nodes(const PriorSpec& prior, const MarketConfig& cfg, std::size_t nodes_per_side) {
    if (nodes_per_side < 16) {
        throw std::invalid_argument("nodes_per_side must be at least 16, got " + std::to_string(nodes_per_side));
    }
    NodeSet nodes;
    nodes.side_count = nodes_per_side;
    nodes.lambda.reserve(2 * nodes_per_side);
    nodes.log_weight.reserve(2 * nodes_per_side);
    if (!is_heavy(prior.kind)) {
        const double dens = cfg.m0 * (1.0 - cfg.m0);
        append_uniform_side(nodes, prior.support_lo, 0.0, dens, nodes_per_side);
        append_uniform_side(nodes, 0.0, prior.support_hi, dens, nodes_per_side);
        return nodes;
    }
    append_heavy_side(nodes, prior.kind, heavy_scale(prior, -1.0, cfg), -1.0, nodes_per_side);
    append_heavy_side(nodes, prior.kind, heavy_scale(prior, 1.0, cfg), 1.0, nodes_per_side);
    return nodes;
}

std::shared_ptr<const NodeSet> make_shared_nodes(const PriorSpec& prior, const MarketConfig& cfg,
                                                 std::size_t nodes_per_side) {
    return std::make_shared<const NodeSet>(build_nodes(prior, cfg, nodes_per_side));
}

}  // namespace villebet
