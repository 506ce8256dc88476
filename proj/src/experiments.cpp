#include "villebet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace villebet {

namespace {

constexpr double kAggregateTolerance = 1e-9;

std::string label(PriorKind kind) { return std::string(to_string(kind)); }

double gap(LogWealth coarse, LogWealth fine) {
    if (coarse == kMinusInf && fine == kMinusInf) {
        return 0.0;
    }
    return std::abs(coarse - fine);
}

struct PriorRun {
    PriorKind kind;
    PriorSpec spec;
    std::unique_ptr<MixtureEngine> engine;
    std::unique_ptr<MixtureEngine> fine;
    double eps = 0.0;
};

std::vector<PriorRun> make_runs(const ExperimentConfig& config, bool track, bool certify) {
    std::vector<PriorRun> runs;
    for (PriorKind kind : config.priors) {
        PriorRun run{kind, make_prior(kind, config.market), nullptr, nullptr, 0.0};
        run.engine = std::make_unique<MixtureEngine>(
            run.spec, config.market, cached_nodes(run.spec, config.market, config.nodes_per_side),
            MixtureEngine::Options{.track_supremum = track});
        if (certify) {
            run.fine = std::make_unique<MixtureEngine>(
                run.spec, config.market, cached_nodes(run.spec, config.market, 2 * config.nodes_per_side),
                MixtureEngine::Options{.track_supremum = false});
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

PriorRun* find_run(std::vector<PriorRun>& runs, PriorKind kind) {
    for (auto& run : runs) {
        if (run.kind == kind) {
            return &run;
        }
    }
    return nullptr;
}

// A step whose slack may or may not be a violation once the run's
// quadrature certificate is known.
struct Pending {
    TraceRow row;
    std::vector<std::tuple<std::string, std::string, double>> slacks;  // check, prior, slack
};

void note_slack(TraceSummary& summary, const std::string& check, double slack) {
    auto [it, inserted] = summary.min_slack.emplace(check, slack);
    if (!inserted) {
        it->second = std::min(it->second, slack);
    }
}

TraceResult run_replication(const ExperimentConfig& config, std::uint64_t replication) {
    const MarketConfig& cfg = config.market;
    Stream stream(config.stream, cfg, config.seed, replication);
    PathState path(cfg, PathState::Retention::HistogramOnly);
    auto runs = make_runs(config, true, config.certify);
    PriorRun* uniform = find_run(runs, PriorKind::Uniform);
    PriorRun* robbins = find_run(runs, PriorKind::Robbins);
    PriorRun* oj = find_run(runs, PriorKind::OrabonaJun);
    const bool aggregate = uniform && robbins;
    const double log_inv_alpha = -std::log(config.alpha);
    const Interval full_cmp = full_comparator(cfg);
    const Interval restricted_cmp = restricted_comparator();

    TraceResult result;
    TraceSummary& summary = result.summary;
    std::vector<Pending> pending;
    std::vector<std::size_t> flagged;  // rows with immediate violations

    LogWealth agg_sup = aggregate ? aggregate_log_wealth(uniform->engine->log_mixture_wealth(),
                                                         robbins->engine->log_mixture_wealth(), config.s0)
                                  : 0.0;
    std::optional<double> hint_full;
    std::optional<double> hint_restricted;
    auto next_checkpoint = config.checkpoints.begin();

    for (std::uint64_t n = 1; n <= config.horizon; ++n) {
        const double x = stream.next();
        path.observe(x);
        for (auto& run : runs) {
            run.engine->step(x);
            if (run.fine) {
                run.fine->step(x);
            }
        }
        const double s = path.s();
        const double v = path.v();
        const HindsightResult full = best_lambda(path, full_cmp, hint_full);
        const HindsightResult restricted = best_lambda(path, restricted_cmp, hint_restricted);
        if (full.location != Location::Degenerate) {
            hint_full = full.lambda_star;
            hint_restricted = restricted.lambda_star;
        }

        TraceRow row;
        row.replication = replication;
        row.n = n;
        row.x = x;
        row.s = s;
        row.v = v;
        row.lnw_star = full.log_wstar;
        row.lnw_star_restricted = restricted.log_wstar;
        row.lambda_star = full.lambda_star;
        row.location = full.location;
        row.branch = classify(s, v, full.location, cfg);

        Pending step;
        const auto check_bound = [&](const std::string& check, PriorKind prior, double bound, double regret_value) {
            const double slack = bound - regret_value;
            note_slack(summary, check, slack);
            if (slack < -kBoundTolerance) {
                step.slacks.emplace_back(check, label(prior), slack);
            }
        };

        if (uniform) {
            row.lnw_uniform = uniform->engine->log_mixture_wealth();
            row.regret_uniform = regret(full.log_wstar, *row.lnw_uniform);
            row.bound_uniform = uniform_bound(n);
            check_bound("uniform", PriorKind::Uniform, *row.bound_uniform, *row.regret_uniform);
        }
        if (robbins) {
            row.lnw_robbins = robbins->engine->log_mixture_wealth();
            row.regret_robbins = regret(full.log_wstar, *row.lnw_robbins);
            ++summary.robbins_branches[std::string(to_string(row.branch))];
            row.bound_robbins = robbins_bound(row.branch, s, v, full.log_wstar, cfg);
            if (row.bound_robbins) {
                check_bound("robbins", PriorKind::Robbins, *row.bound_robbins, *row.regret_robbins);
                if (robbins->engine->ville_state(config.alpha).inside) {
                    double conditional = std::max(*robbins_bound(Branch::SmallDriftInterior, s, v, 0.0, cfg),
                                                  *robbins_bound(Branch::SmallDriftBoundary, s, v, 0.0, cfg));
                    if (auto c = robbins_conditional_bound(row.branch, s, v, config.alpha, cfg)) {
                        conditional = std::max(conditional, *c);
                    }
                    check_bound("robbins_conditional", PriorKind::Robbins, conditional, *row.regret_robbins);
                }
            }
            if (auto a1 = lemma_a1_bound(full.log_wstar, full.lambda_star, robbins->spec, cfg)) {
                check_bound("lemma_a1", PriorKind::Robbins, *a1, *row.regret_robbins);
            }
            if (auto a2 = lemma_a2_bound(full, v, robbins->spec, cfg)) {
                check_bound("lemma_a2", PriorKind::Robbins, *a2, *row.regret_robbins);
            }
        }
        if (oj) {
            row.lnw_oj = oj->engine->log_mixture_wealth();
            row.regret_oj = regret(restricted.log_wstar, *row.lnw_oj);
            const Branch oj_branch = classify_oj(s, v, restricted.location);
            ++summary.oj_branches[std::string(to_string(oj_branch))];
            row.bound_oj = oj_bound(oj_branch, s, v, restricted.log_wstar);
            if (row.bound_oj) {
                check_bound("oj", PriorKind::OrabonaJun, *row.bound_oj, *row.regret_oj);
            }
        }

        bool immediate = false;
        if (aggregate) {
            row.lnw_agg = aggregate_log_wealth(*row.lnw_uniform, *row.lnw_robbins, config.s0);
            agg_sup = std::max(agg_sup, *row.lnw_agg);
            row.regret_agg = regret(full.log_wstar, *row.lnw_agg);
            row.bound_agg = aggregate_bound(*row.regret_uniform, *row.regret_robbins, config.s0);
            const double slack = *row.bound_agg - *row.regret_agg;
            note_slack(summary, "aggregate", slack);
            if (slack < -kAggregateTolerance) {
                ++summary.violations["aggregate"];
                immediate = true;
            }
            row.ville_inside = agg_sup <= log_inv_alpha;
        } else if (!runs.empty()) {
            row.ville_inside = runs.front().engine->ville_state(config.alpha).inside;
        }
        for (std::string_view fact : envelope_violations(s, v, full, restricted.log_wstar, cfg)) {
            ++summary.violations["envelope_" + std::string(fact)];
            immediate = true;
        }

        const bool at_checkpoint = next_checkpoint != config.checkpoints.end() && *next_checkpoint == n;
        if (at_checkpoint || n == config.horizon) {
            for (auto& run : runs) {
                if (run.fine) {
                    run.eps = std::max(run.eps, gap(run.engine->log_mixture_wealth(), run.fine->log_mixture_wealth()));
                }
            }
        }
        row.violation = immediate;
        if (at_checkpoint || immediate) {
            if (immediate) {
                flagged.push_back(result.rows.size());
            }
            result.rows.push_back(row);
        }
        while (next_checkpoint != config.checkpoints.end() && *next_checkpoint <= n) {
            ++next_checkpoint;
        }
        if (!step.slacks.empty()) {
            step.row = row;
            pending.push_back(std::move(step));
        }
    }
    summary.steps = config.horizon;

    double eps_max = 0.0;
    for (const auto& run : runs) {
        summary.eps_quad[label(run.kind)] = run.eps;
        eps_max = std::max(eps_max, run.eps);
    }
    for (auto& p : pending) {
        bool violated = false;
        for (const auto& [check, prior, slack] : p.slacks) {
            if (slack < -(summary.eps_quad[prior] + kBoundTolerance)) {
                ++summary.violations[check];
                violated = true;
            }
        }
        if (!violated) {
            continue;
        }
        auto existing = std::find_if(result.rows.begin(), result.rows.end(),
                                     [&](const TraceRow& r) { return r.n == p.row.n; });
        if (existing != result.rows.end()) {
            existing->violation = true;
        } else {
            p.row.violation = true;
            result.rows.push_back(p.row);
        }
    }
    std::sort(result.rows.begin(), result.rows.end(),
              [](const TraceRow& a, const TraceRow& b) { return a.n < b.n; });
    for (auto& row : result.rows) {
        row.eps_quad = eps_max;
    }
    return result;
}

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void put(std::ostream& out, const std::optional<double>& value) {
    if (value) {
        out << format_double(*value);
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!(s0 > 0.0 && s0 < 1.0)) throw std::invalid_argument("s0 must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (nodes_per_side < 16) throw std::invalid_argument("nodes_per_side must be at least 16");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
        throw std::invalid_argument("checkpoints must be sorted ascending");
    }
    if (!checkpoints.empty() && (checkpoints.front() < 1 || checkpoints.back() > horizon)) {
        throw std::invalid_argument("checkpoints must lie in [1, horizon]");
    }
}

bool ExperimentConfig::has(PriorKind kind) const {
    return std::find(priors.begin(), priors.end(), kind) != priors.end();
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 1; n < horizon; n *= 2) {
        out.push_back(n);
    }
    if (horizon >= 1) {
        out.push_back(horizon);
    }
    return out;
}

std::shared_ptr<const NodeSet> cached_nodes(const PriorSpec& prior, const MarketConfig& cfg,
                                            std::size_t nodes_per_side) {
    using Key = std::tuple<int, double, std::size_t>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const NodeSet>> cache;
    const Key key{static_cast<int>(prior.kind), cfg.m0, nodes_per_side};
    std::lock_guard lock(mutex);
    auto& slot = cache[key];
    if (!slot) {
        slot = make_shared_nodes(prior, cfg, nodes_per_side);
    }
    return slot;
}

std::uint64_t TraceSummary::total_violations() const {
    std::uint64_t total = 0;
    for (const auto& [name, count] : violations) {
        total += count;
    }
    return total;
}

double TraceSummary::max_eps_quad() const {
    double out = 0.0;
    for (const auto& [name, eps] : eps_quad) {
        out = std::max(out, eps);
    }
    return out;
}

void TraceSummary::merge(const TraceSummary& other) {
    for (const auto& [name, count] : other.violations) violations[name] += count;
    for (const auto& [name, slack] : other.min_slack) note_slack(*this, name, slack);
    for (const auto& [name, eps] : other.eps_quad) eps_quad[name] = std::max(eps_quad[name], eps);
    for (const auto& [name, count] : other.robbins_branches) robbins_branches[name] += count;
    for (const auto& [name, count] : other.oj_branches) oj_branches[name] += count;
    steps += other.steps;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) {
        w.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

TraceResult run_trace(const ExperimentConfig& config) {
    config.validate();
    std::vector<TraceResult> parts(config.replications);
    parallel_for(config.replications, config.threads,
                 [&](std::size_t rep) { parts[rep] = run_replication(config, rep); });
    TraceResult out;
    for (auto& part : parts) {
        out.summary.merge(part.summary);
        out.rows.insert(out.rows.end(), part.rows.begin(), part.rows.end());
    }
    return out;
}

std::string trace_csv_header() {
    return "n,x_n,S_n,V_n,lnW_uniform,lnW_robbins,lnW_oj,lnW_agg,lnW_star,lnW_star_restricted,lambda_star,"
           "lambda_star_location,branch,regret_uniform,bound_uniform,regret_robbins,bound_robbins,regret_oj,bound_oj,"
           "regret_agg,bound_agg,ville_inside,eps_quad";
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << trace_csv_header() << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << format_double(r.x) << ',' << format_double(r.s) << ',' << format_double(r.v) << ',';
        put(out, r.lnw_uniform);
        out << ',';
        put(out, r.lnw_robbins);
        out << ',';
        put(out, r.lnw_oj);
        out << ',';
        put(out, r.lnw_agg);
        out << ',' << format_double(r.lnw_star) << ',' << format_double(r.lnw_star_restricted) << ','
            << format_double(r.lambda_star) << ',' << to_string(r.location) << ',' << to_string(r.branch) << ',';
        put(out, r.regret_uniform);
        out << ',';
        put(out, r.bound_uniform);
        out << ',';
        put(out, r.regret_robbins);
        out << ',';
        put(out, r.bound_robbins);
        out << ',';
        put(out, r.regret_oj);
        out << ',';
        put(out, r.bound_oj);
        out << ',';
        put(out, r.regret_agg);
        out << ',';
        put(out, r.bound_agg);
        out << ',';
        if (r.ville_inside) {
            out << (*r.ville_inside ? "true" : "false");
        }
        out << ',' << format_double(r.eps_quad) << '\n';
    }
}

const GrowthEntry* GrowthResult::find(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.label == name) return &e;
    }
    return nullptr;
}

bool half_rate_condition(double mean, double variance, const MarketConfig& cfg) {
    const double drift = mean - cfg.m0;
    const double denom = variance + drift * drift;
    if (denom == 0.0) {
        return false;
    }
    return cfg.beta_l / 5.0 < std::abs(drift) / denom;
}

GrowthResult growth_rate(const ExperimentConfig& config) {
    config.validate();
    const MarketConfig& cfg = config.market;
    Stream stream(config.stream, cfg, config.seed, 0);
    PathState path(cfg, PathState::Retention::HistogramOnly);
    auto runs = make_runs(config, false, false);
    for (std::uint64_t n = 1; n <= config.horizon; ++n) {
        const double x = stream.next();
        path.observe(x);
        for (auto& run : runs) {
            run.engine->step(x);
        }
    }
    GrowthResult out;
    out.n = path.n();
    out.s = path.s();
    out.v = path.v();
    const double n = static_cast<double>(out.n);
    const auto add = [&](std::string name, LogWealth lw) {
        out.entries.push_back({std::move(name), lw, lw / n, out.v > 0.0 ? lw / out.v : 0.0});
    };
    for (const auto& run : runs) {
        add(label(run.kind), run.engine->log_mixture_wealth());
    }
    PriorRun* uniform = find_run(runs, PriorKind::Uniform);
    PriorRun* robbins = find_run(runs, PriorKind::Robbins);
    if (uniform && robbins) {
        add("aggregate", aggregate_log_wealth(uniform->engine->log_mixture_wealth(),
                                              robbins->engine->log_mixture_wealth(), config.s0));
    }
    out.empirical_klinf = best_lambda(path, full_comparator(cfg)).log_wstar / n;
    if (auto dist = reference_distribution(config.stream)) {
        out.klinf_reference = klinf(*dist, cfg.m0);
        const auto moments = *stream_moments(config.stream);
        const double drift = moments.mean - cfg.m0;
        const double denom = moments.variance + drift * drift;
        if (denom > 0.0) {
            out.normalized_reference = *out.klinf_reference / denom;
            out.half_normalized_reference = 0.5 * *out.normalized_reference;
        }
        out.half_rate_regime = half_rate_condition(moments.mean, moments.variance, cfg);
    }
    return out;
}

std::optional<double> lil_ratio(double s, double v) {
    if (!(v > std::exp(1.0))) {
        return std::nullopt;
    }
    return std::abs(s) / std::sqrt(2.0 * v * std::log(std::log(v)));
}

LilResult lil_trace(const ExperimentConfig& config, std::uint64_t window_start) {
    config.validate();
    const MarketConfig& cfg = config.market;
    Stream stream(config.stream, cfg, config.seed, 0);
    PathState path(cfg, PathState::Retention::HistogramOnly);
    const PriorSpec prior = make_prior(PriorKind::Robbins, cfg);
    MixtureEngine engine(prior, cfg, cached_nodes(prior, cfg, config.nodes_per_side),
                         MixtureEngine::Options{.track_supremum = false});
    LilResult out;
    auto next_checkpoint = config.checkpoints.begin();
    for (std::uint64_t n = 1; n <= config.horizon; ++n) {
        const double x = stream.next();
        path.observe(x);
        engine.step(x);
        const auto ratio = lil_ratio(path.s(), path.v());
        if (ratio && n >= window_start) {
            out.max_lil_ratio = std::max(out.max_lil_ratio.value_or(0.0), *ratio);
        }
        const bool at_checkpoint = next_checkpoint != config.checkpoints.end() && *next_checkpoint == n;
        while (next_checkpoint != config.checkpoints.end() && *next_checkpoint <= n) {
            ++next_checkpoint;
        }
        if (!at_checkpoint && n != config.horizon) {
            continue;
        }
        LilRow row{n, path.s(), path.v(), true, 0.0, 0.0};
        if (ratio) {
            const double lnw_star = best_lambda(path, full_comparator(cfg)).log_wstar;
            row.skipped = false;
            row.lil_ratio = *ratio;
            row.regret_ratio = regret(lnw_star, engine.log_mixture_wealth()) / std::log(std::log(path.v()));
            if (n == config.horizon) {
                out.final_regret_ratio = row.regret_ratio;
            }
        }
        if (at_checkpoint) {
            out.rows.push_back(row);
        }
    }
    return out;
}

const CoverageEntry* CoverageResult::find(const std::string& name) const {
    for (const auto& e : entries) {
        if (e.label == name) return &e;
    }
    return nullptr;
}

std::vector<CoverageResult> ville_coverage(const ExperimentConfig& config, const std::vector<double>& alphas) {
    config.validate();
    if (alphas.empty()) {
        return {};
    }
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
    }
    const MarketConfig& cfg = config.market;
    const double stop_level = -std::log(*std::min_element(alphas.begin(), alphas.end()));
    const bool aggregate = config.has(PriorKind::Uniform) && config.has(PriorKind::Robbins);
    const bool tracked = config.stream.kind == StreamKind::NsmAdversary;

    std::vector<std::string> labels;
    for (PriorKind kind : config.priors) labels.push_back(label(kind));
    const std::size_t agg_index = labels.size();
    if (aggregate) labels.push_back("aggregate");
    const std::size_t tracked_index = labels.size();
    if (tracked) labels.push_back("tracked");

    // sup log-wealth per replication and label, capped once past every threshold.
    std::vector<std::vector<double>> sups(config.replications);
    parallel_for(config.replications, config.threads, [&](std::size_t rep) {
        Stream stream(config.stream, cfg, config.seed, rep);
        auto runs = make_runs(config, false, false);
        std::vector<double> sup(labels.size(), kMinusInf);
        std::vector<bool> done(labels.size(), false);
        const auto observe = [&](std::size_t i, LogWealth lw) {
            sup[i] = std::max(sup[i], lw);
            done[i] = sup[i] > stop_level;
        };
        const auto record_all = [&] {
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (!done[i] || (aggregate && !done[agg_index])) {
                    observe(i, runs[i].engine->log_mixture_wealth());
                }
            }
            if (aggregate && !done[agg_index]) {
                const auto& u = *find_run(runs, PriorKind::Uniform)->engine;
                const auto& r = *find_run(runs, PriorKind::Robbins)->engine;
                observe(agg_index, aggregate_log_wealth(u.log_mixture_wealth(), r.log_mixture_wealth(), config.s0));
            }
            if (tracked && !done[tracked_index]) {
                observe(tracked_index, stream.adversary_state().log_mixture);
            }
        };
        record_all();
        for (std::uint64_t n = 1; n <= config.horizon; ++n) {
            if (std::all_of(done.begin(), done.end(), [](bool d) { return d; })) {
                break;
            }
            const double x = stream.next();
            for (std::size_t i = 0; i < runs.size(); ++i) {
                const bool component = aggregate && (runs[i].kind == PriorKind::Uniform ||
                                                     runs[i].kind == PriorKind::Robbins);
                if (!done[i] || (component && !done[agg_index])) {
                    runs[i].engine->step(x);
                }
            }
            record_all();
        }
        sups[rep] = std::move(sup);
    });

    std::vector<CoverageResult> out;
    for (double a : alphas) {
        CoverageResult result;
        result.alpha = a;
        const double r = static_cast<double>(config.replications);
        result.tolerance_limit = a + 3.0 * std::sqrt(a * (1.0 - a) / r);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            CoverageEntry entry{labels[i], 0, config.replications};
            for (const auto& sup : sups) {
                entry.exceed += sup[i] > -std::log(a) ? 1 : 0;
            }
            result.entries.push_back(entry);
        }
        out.push_back(std::move(result));
    }
    return out;
}

std::vector<CorpusEntry> check_corpus(std::size_t count, std::uint64_t base_seed) {
    const double m0s[] = {0.25, 0.5, 0.7};
    std::vector<CorpusEntry> out;
    for (std::size_t i = 0; i < count; ++i) {
        CorpusEntry entry;
        entry.market = make_market(m0s[i % 3]);
        entry.seed = base_seed + i;
        const std::size_t kind = (i / 3) % 16;
        const double m0 = entry.market.m0;
        StreamSpec& s = entry.stream;
        if (kind < 9) {
            s = parse_stream_spec("bernoulli:p=" + std::to_string(0.1 * static_cast<double>(kind + 1)));
        } else if (kind == 9) {
            s.kind = StreamKind::Bernoulli;
            s.p = m0;
        } else if (kind == 10) {
            s.kind = StreamKind::Bernoulli;
            s.p = m0 + 0.02;
        } else if (kind == 11) {
            s = parse_stream_spec("beta:a=2,b=5");
        } else if (kind == 12) {
            s = parse_stream_spec("discrete:points=0/0.3/0.5/1,weights=0.2/0.3/0.3/0.2");
        } else if (kind == 13) {
            s = parse_stream_spec("constant:x=0");
        } else if (kind == 14) {
            s = parse_stream_spec("constant:x=1");
        } else {
            s = parse_stream_spec("pointmass:x=1");
        }
        out.push_back(std::move(entry));
    }
    return out;
}

CorpusReport run_corpus(const std::vector<CorpusEntry>& corpus, std::uint64_t horizon, std::size_t nodes_per_side,
                        double alpha, unsigned threads,
                        const std::function<void(std::size_t, std::size_t)>& progress) {
    std::vector<TraceResult> results(corpus.size());
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    parallel_for(corpus.size(), threads, [&](std::size_t i) {
        ExperimentConfig config;
        config.market = corpus[i].market;
        config.stream = corpus[i].stream;
        config.seed = corpus[i].seed;
        config.horizon = horizon;
        config.nodes_per_side = nodes_per_side;
        config.alpha = alpha;
        config.checkpoints = geometric_checkpoints(horizon);
        config.threads = 1;
        results[i] = run_trace(config);
        // Keep only what the report needs.
        std::erase_if(results[i].rows, [](const TraceRow& r) { return !r.violation; });
        const std::size_t finished = ++done;
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(finished, corpus.size());
        }
    });
    CorpusReport report;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& summary = results[i].summary;
        report.summary.merge(summary);
        ++report.runs;
        report.violation_rows += results[i].rows.size();
        if (summary.total_violations() > 0 && report.failures.size() < 20) {
            std::ostringstream msg;
            msg << "m0=" << corpus[i].market.m0 << " stream=" << format_stream_spec(corpus[i].stream)
                << " seed=" << corpus[i].seed << ':';
            for (const auto& [name, count] : summary.violations) {
                msg << ' ' << name << 'x' << count;
            }
            report.failures.push_back(msg.str());
        }
    }
    return report;
}

}  // namespace villebet
