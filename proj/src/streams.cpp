#include "villebet/streams.hpp"

#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "villebet/mixture.hpp"

namespace villebet {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr int kBetaNodes = 100;

double parse_double(std::string_view text) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> parse_list(std::string_view text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t cut = std::min(text.find('/', start), text.size());
        out.push_back(parse_double(text.substr(start, cut - start)));
        start = cut + 1;
    }
    return out;
}

std::map<std::string, std::string, std::less<>> parse_params(std::string_view text) {
    std::map<std::string, std::string, std::less<>> out;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t cut = std::min(text.find(',', start), text.size());
        const std::string_view item = text.substr(start, cut - start);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw std::invalid_argument("expected key=value, got '" + std::string(item) + "'");
        }
        out.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
        start = cut + 1;
    }
    return out;
}

std::string join(const std::vector<double>& values) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << (i ? "/" : "") << values[i];
    }
    return out.str();
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

void validate(const StreamSpec& spec, const MarketConfig& cfg) {
    switch (spec.kind) {
        case StreamKind::Bernoulli:
            if (!in_unit(spec.p)) throw std::invalid_argument("bernoulli p must lie in [0,1]");
            break;
        case StreamKind::ScaledBeta:
            if (!(spec.a > 0.0 && spec.b > 0.0)) throw std::invalid_argument("beta parameters must be positive");
            break;
        case StreamKind::Discrete: {
            if (spec.points.empty() || spec.points.size() != spec.weights.size()) {
                throw std::invalid_argument("discrete stream needs matching points and weights");
            }
            double total = 0.0;
            for (std::size_t i = 0; i < spec.points.size(); ++i) {
                if (!in_unit(spec.points[i]) || !(spec.weights[i] >= 0.0)) {
                    throw std::invalid_argument("discrete points must lie in [0,1] with nonnegative weights");
                }
                total += spec.weights[i];
            }
            if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("discrete weights must sum to 1");
            break;
        }
        case StreamKind::PointMass:
        case StreamKind::Constant:
            if (!in_unit(spec.x)) throw std::invalid_argument("constant value must lie in [0,1]");
            break;
        case StreamKind::NsmAdversary:
            if (!(spec.delta > 0.0 && spec.delta < cfg.beta_l)) {
                throw std::invalid_argument("adversary delta must lie in (0, min{m0, 1-m0})");
            }
            if (!spec.adversary_prior) {
                if (!(spec.lambda1 > 0.0 && spec.lambda1 <= cfg.lambda_max && spec.lambda2 < 0.0 &&
                      spec.lambda2 >= cfg.lambda_min)) {
                    throw std::invalid_argument("adversary needs lambda_min <= l2 < 0 < l1 <= lambda_max");
                }
                if (!(spec.pi_mix > 0.0 && spec.pi_mix < 1.0)) {
                    throw std::invalid_argument("adversary pi must lie in (0,1)");
                }
            }
            break;
    }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t replication) noexcept
    : key_(splitmix64(splitmix64(seed) ^ splitmix64(replication + kGamma))) {}

Rng::result_type Rng::operator()() noexcept { return splitmix64(key_ + (++counter_) * kGamma); }

double Rng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::string_view to_string(StreamKind kind) {
    switch (kind) {
        case StreamKind::Bernoulli:
            return "bernoulli";
        case StreamKind::ScaledBeta:
            return "beta";
        case StreamKind::Discrete:
            return "discrete";
        case StreamKind::PointMass:
            return "pointmass";
        case StreamKind::Constant:
            return "constant";
        case StreamKind::NsmAdversary:
            return "nsm-adv";
    }
    return "unknown";
}

StreamSpec parse_stream_spec(std::string_view text) {
    const std::size_t colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    const auto params = parse_params(colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1));
    std::vector<std::string_view> allowed;
    const auto get = [&](std::string_view key, double fallback) {
        allowed.push_back(key);
        const auto it = params.find(key);
        return it == params.end() ? fallback : parse_double(it->second);
    };

    StreamSpec spec;
    if (name == "bernoulli") {
        spec.kind = StreamKind::Bernoulli;
        spec.p = get("p", 0.5);
    } else if (name == "beta") {
        spec.kind = StreamKind::ScaledBeta;
        spec.a = get("a", 1.0);
        spec.b = get("b", 1.0);
    } else if (name == "pointmass" || name == "constant") {
        spec.kind = name == "pointmass" ? StreamKind::PointMass : StreamKind::Constant;
        spec.x = get("x", 1.0);
    } else if (name == "discrete") {
        spec.kind = StreamKind::Discrete;
        allowed = {"points", "weights"};
        const auto points = params.find("points");
        const auto weights = params.find("weights");
        if (points == params.end() || weights == params.end()) {
            throw std::invalid_argument("discrete stream needs points= and weights=");
        }
        spec.points = parse_list(points->second);
        spec.weights = parse_list(weights->second);
    } else if (name == "nsm-adv") {
        spec.kind = StreamKind::NsmAdversary;
        spec.delta = get("delta", 0.1);
        spec.lambda1 = get("l1", 1.0);
        spec.lambda2 = get("l2", -1.0);
        spec.pi_mix = get("pi", 0.5);
        allowed.push_back("mixture");
        if (const auto it = params.find("mixture"); it != params.end()) {
            spec.adversary_prior = parse_prior_kind(it->second);
        }
    } else {
        throw std::invalid_argument("unknown stream kind '" + std::string(name) + "'");
    }
    for (const auto& [key, value] : params) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::invalid_argument("unknown parameter '" + key + "' for stream " + std::string(name));
        }
    }
    return spec;
}

std::string format_stream_spec(const StreamSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << to_string(spec.kind) << ':';
    switch (spec.kind) {
        case StreamKind::Bernoulli:
            out << "p=" << spec.p;
            break;
        case StreamKind::ScaledBeta:
            out << "a=" << spec.a << ",b=" << spec.b;
            break;
        case StreamKind::Discrete:
            out << "points=" << join(spec.points) << ",weights=" << join(spec.weights);
            break;
        case StreamKind::PointMass:
        case StreamKind::Constant:
            out << "x=" << spec.x;
            break;
        case StreamKind::NsmAdversary:
            out << "delta=" << spec.delta << ",l1=" << spec.lambda1 << ",l2=" << spec.lambda2 << ",pi=" << spec.pi_mix;
            if (spec.adversary_prior) {
                out << ",mixture=" << (*spec.adversary_prior == PriorKind::OrabonaJun
                                           ? std::string("oj")
                                           : std::string(to_string(*spec.adversary_prior)));
            }
            break;
    }
    return out.str();
}

std::optional<std::vector<WeightedPoint>> reference_distribution(const StreamSpec& spec) {
    switch (spec.kind) {
        case StreamKind::Bernoulli:
            return std::vector<WeightedPoint>{{0.0, 1.0 - spec.p}, {1.0, spec.p}};
        case StreamKind::PointMass:
        case StreamKind::Constant:
            return std::vector<WeightedPoint>{{spec.x, 1.0}};
        case StreamKind::Discrete: {
            std::vector<WeightedPoint> out;
            for (std::size_t i = 0; i < spec.points.size(); ++i) {
                out.push_back({spec.points[i], spec.weights[i]});
            }
            return out;
        }
        case StreamKind::ScaledBeta: {
            using Rule = boost::math::quadrature::gauss<double, kBetaNodes>;
            const boost::math::beta_distribution<double> law(spec.a, spec.b);
            std::vector<WeightedPoint> out;
            double total = 0.0;
            const auto add = [&](double t, double w) {
                const double x = 0.5 * (1.0 + t);
                out.push_back({x, 0.5 * w * boost::math::pdf(law, x)});
                total += out.back().count;
            };
            const auto& abscissa = Rule::abscissa();
            const auto& weight = Rule::weights();
            for (std::size_t i = 0; i < abscissa.size(); ++i) {
                if (abscissa[i] == 0.0) {
                    add(0.0, weight[i]);
                    continue;
                }
                add(-abscissa[i], weight[i]);
                add(abscissa[i], weight[i]);
            }
            for (auto& p : out) {
                p.count /= total;
            }
            return out;
        }
        case StreamKind::NsmAdversary:
            break;
    }
    return std::nullopt;
}

std::optional<Moments> stream_moments(const StreamSpec& spec) {
    switch (spec.kind) {
        case StreamKind::Bernoulli:
            return Moments{spec.p, spec.p * (1.0 - spec.p)};
        case StreamKind::PointMass:
        case StreamKind::Constant:
            return Moments{spec.x, 0.0};
        case StreamKind::ScaledBeta: {
            const double sum = spec.a + spec.b;
            return Moments{spec.a / sum, spec.a * spec.b / (sum * sum * (sum + 1.0))};
        }
        case StreamKind::Discrete: {
            double mean = 0.0;
            double second = 0.0;
            for (std::size_t i = 0; i < spec.points.size(); ++i) {
                mean += spec.weights[i] * spec.points[i];
                second += spec.weights[i] * spec.points[i] * spec.points[i];
            }
            return Moments{mean, std::max(second - mean * mean, 0.0)};
        }
        case StreamKind::NsmAdversary:
            break;
    }
    return std::nullopt;
}

Stream::Stream(const StreamSpec& spec, const MarketConfig& cfg, std::uint64_t seed, std::uint64_t replication)
    : spec_(spec), cfg_(cfg), rng_(seed, replication) {
    validate(spec_, cfg_);
    if (spec_.kind == StreamKind::Discrete) {
        double running = 0.0;
        for (double w : spec_.weights) {
            running += w;
            cumulative_.push_back(running);
        }
        cumulative_.back() = 1.0;
    }
    if (spec_.kind == StreamKind::NsmAdversary && spec_.adversary_prior) {
        const PriorSpec prior = make_prior(*spec_.adversary_prior, cfg_);
        tracked_ = std::make_unique<MixtureEngine>(prior, cfg_, make_shared_nodes(prior, cfg_, kDefaultNodesPerSide),
                                                   MixtureEngine::Options{.track_supremum = false});
    }
}

Stream::~Stream() = default;
Stream::Stream(Stream&&) noexcept = default;
Stream& Stream::operator=(Stream&&) noexcept = default;

double Stream::adversary_a() const {
    if (tracked_) {
        const auto lw = tracked_->node_log_wealth();
        const auto& nodes = tracked_->nodes();
        double peak = kMinusInf;
        for (std::size_t k = 0; k < lw.size(); ++k) {
            peak = std::max(peak, lw[k] + nodes.log_weight[k]);
        }
        double total = 0.0;
        for (std::size_t k = 0; k < lw.size(); ++k) {
            total += std::exp(lw[k] + nodes.log_weight[k] - peak) * nodes.lambda[k];
        }
        return total * std::exp(peak);
    }
    return spec_.pi_mix * std::exp(log_w1_) * spec_.lambda1 + (1.0 - spec_.pi_mix) * std::exp(log_w2_) * spec_.lambda2;
}

AdversaryState Stream::adversary_state() const {
    if (spec_.kind != StreamKind::NsmAdversary) {
        throw std::logic_error("adversary_state is only defined for nsm-adv streams");
    }
    AdversaryState state;
    state.a = adversary_a();
    const double sign = state.a > 0.0 ? 1.0 : (state.a < 0.0 ? -1.0 : 0.0);
    state.conditional_mean = cfg_.m0 + spec_.delta * sign;
    state.decrement = spec_.delta * std::abs(state.a);
    state.log_mixture = tracked_ ? tracked_->log_mixture_wealth()
                                 : log_add_exp(std::log(spec_.pi_mix) + log_w1_, std::log1p(-spec_.pi_mix) + log_w2_);
    return state;
}

double Stream::next() {
    double x = 0.0;
    switch (spec_.kind) {
        case StreamKind::Bernoulli:
            x = rng_.uniform() < spec_.p ? 1.0 : 0.0;
            break;
        case StreamKind::ScaledBeta: {
            std::gamma_distribution<double> ga(spec_.a, 1.0);
            std::gamma_distribution<double> gb(spec_.b, 1.0);
            const double u = ga(rng_);
            const double v = gb(rng_);
            x = u + v > 0.0 ? u / (u + v) : 0.5;
            break;
        }
        case StreamKind::Discrete: {
            const double u = rng_.uniform();
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            x = spec_.points[std::min<std::size_t>(it - cumulative_.begin(), spec_.points.size() - 1)];
            break;
        }
        case StreamKind::PointMass:
        case StreamKind::Constant:
            x = spec_.x;
            break;
        case StreamKind::NsmAdversary: {
            const double mean = adversary_state().conditional_mean;
            x = rng_.uniform() < mean ? 1.0 : 0.0;
            if (tracked_) {
                tracked_->step(x);
            } else {
                log_w1_ += log_payoff_centered(spec_.lambda1, x - cfg_.m0);
                log_w2_ += log_payoff_centered(spec_.lambda2, x - cfg_.m0);
            }
            break;
        }
    }
    ++emitted_;
    return x;
}

double adversary_decrement(const AdversaryState& state) noexcept { return state.decrement; }

}  // namespace villebet
