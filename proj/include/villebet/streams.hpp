#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "villebet/core.hpp"
#include "villebet/priors.hpp"

namespace villebet {

/// Counter-based generator: output i of key k is splitmix64(k + i * gamma).
/// Independent replications use split keys, so streams never share state.
/// The mapping from (seed, replication) to values is fixed by this file.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t replication = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;
    /// Uniform on [0,1) with 53 random bits.
    double uniform() noexcept;
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

enum class StreamKind { Bernoulli, ScaledBeta, Discrete, PointMass, Constant, NsmAdversary };

std::string_view to_string(StreamKind kind);

struct StreamSpec {
    StreamKind kind = StreamKind::Bernoulli;
    double p = 0.5;                  // Bernoulli
    double a = 1.0, b = 1.0;         // ScaledBeta
    std::vector<double> points;      // Discrete
    std::vector<double> weights;     // Discrete
    double x = 1.0;                  // PointMass / Constant
    double delta = 0.1;              // NsmAdversary
    double lambda1 = 1.0;
    double lambda2 = -1.0;
    double pi_mix = 0.5;
    /// When set, the adversary tracks this continuous mixture instead of the
    /// two-point one.
    std::optional<PriorKind> adversary_prior;
};

/// Parses "bernoulli:p=0.8", "beta:a=2,b=5", "pointmass:x=1", "constant:x=0",
/// "discrete:points=0/0.5/1,weights=0.2/0.3/0.5" and
/// "nsm-adv:delta=0.1,l1=1,l2=-1,pi=0.5[,mixture=robbins]".
/// Throws std::invalid_argument on malformed input.
StreamSpec parse_stream_spec(std::string_view text);

/// Canonical text form accepted by parse_stream_spec.
std::string format_stream_spec(const StreamSpec& spec);

/// The law of an iid stream as weighted support points summing to 1. Beta
/// laws are discretized by Gauss-Legendre; moments of polynomials of degree
/// below 200 are exact. Empty for the adversary.
std::optional<std::vector<WeightedPoint>> reference_distribution(const StreamSpec& spec);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Exact mean and variance of an iid stream; empty for the adversary.
std::optional<Moments> stream_moments(const StreamSpec& spec);

class MixtureEngine;

/// State of the adversary just before the next draw.
struct AdversaryState {
    double a = 0.0;                 // A_{n-1}
    double conditional_mean = 0.0;  // E[X_n | F_{n-1}]
    double decrement = 0.0;         // delta |A_{n-1}|
    LogWealth log_mixture = 0.0;    // log-wealth of the tracked mixture
};

/// A seeded data stream. Values always lie in [0,1].
class Stream {
public:
    /// Throws std::invalid_argument for parameters outside their domains.
    Stream(const StreamSpec& spec, const MarketConfig& cfg, std::uint64_t seed, std::uint64_t replication = 0);
    ~Stream();
    Stream(Stream&&) noexcept;
    Stream& operator=(Stream&&) noexcept;

    double next();

    const StreamSpec& spec() const noexcept { return spec_; }
    std::uint64_t emitted() const noexcept { return emitted_; }

    /// Only for NsmAdversary streams; throws std::logic_error otherwise.
    AdversaryState adversary_state() const;

private:
    double adversary_a() const;

    StreamSpec spec_;
    MarketConfig cfg_;
    Rng rng_;
    std::uint64_t emitted_ = 0;
    std::vector<double> cumulative_;  // Discrete
    LogWealth log_w1_ = 0.0;          // two-point adversary
    LogWealth log_w2_ = 0.0;
    std::unique_ptr<MixtureEngine> tracked_;  // continuous-mixture adversary
};

/// delta |A| for an adversary state.
double adversary_decrement(const AdversaryState& state) noexcept;

}  // namespace villebet
