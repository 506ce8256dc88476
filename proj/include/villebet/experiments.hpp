#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "villebet/core.hpp"
#include "villebet/hindsight.hpp"
#include "villebet/mixture.hpp"
#include "villebet/priors.hpp"
#include "villebet/regret_bounds.hpp"
#include "villebet/streams.hpp"

namespace villebet {

struct ExperimentConfig {
    MarketConfig market = make_market(0.5);
    StreamSpec stream;
    std::uint64_t seed = 1;
    std::uint64_t horizon = 1000;
    std::vector<PriorKind> priors{PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun};
    double s0 = 0.5;
    double alpha = 0.05;
    std::size_t nodes_per_side = kDefaultNodesPerSide;
    std::uint64_t replications = 1;
    /// Rows are emitted at these n (sorted ascending, each in [1, horizon]).
    std::vector<std::uint64_t> checkpoints;
    /// Run 2K-node twin engines and certify the quadrature error.
    bool certify = true;
    /// Worker threads for replications; 0 means hardware concurrency.
    unsigned threads = 0;

    /// Throws std::invalid_argument when an invariant fails.
    void validate() const;
    bool has(PriorKind kind) const;
};

/// 1, 2, 4, ..., plus the horizon itself.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t horizon);

/// Shared immutable node sets, built once per (prior, m0, K).
std::shared_ptr<const NodeSet> cached_nodes(const PriorSpec& prior, const MarketConfig& cfg,
                                            std::size_t nodes_per_side);

struct TraceRow {
    std::uint64_t replication = 0;
    std::uint64_t n = 0;
    double x = 0.0;
    double s = 0.0;
    double v = 0.0;
    std::optional<double> lnw_uniform, lnw_robbins, lnw_oj, lnw_agg;
    double lnw_star = 0.0;
    double lnw_star_restricted = 0.0;
    double lambda_star = 0.0;
    Location location = Location::Degenerate;
    Branch branch = Branch::Degenerate;
    std::optional<double> regret_uniform, bound_uniform;
    std::optional<double> regret_robbins, bound_robbins;
    std::optional<double> regret_oj, bound_oj;
    std::optional<double> regret_agg, bound_agg;
    std::optional<bool> ville_inside;
    double eps_quad = 0.0;
    bool violation = false;
};

/// Outcome of every per-step assertion in a run.
struct TraceSummary {
    /// Violations by check name: uniform, robbins, oj, aggregate,
    /// robbins_conditional, lemma_a1, lemma_a2, and one entry per envelope fact.
    std::map<std::string, std::uint64_t> violations;
    /// Smallest bound - regret over all n, by bound name.
    std::map<std::string, double> min_slack;
    /// Refinement gap per prior, maximized over checkpoints and the horizon.
    std::map<std::string, double> eps_quad;
    /// Number of steps in each Robbins branch and each OJ branch.
    std::map<std::string, std::uint64_t> robbins_branches;
    std::map<std::string, std::uint64_t> oj_branches;
    std::uint64_t steps = 0;

    std::uint64_t total_violations() const;
    double max_eps_quad() const;
    void merge(const TraceSummary& other);
};

struct TraceResult {
    std::vector<TraceRow> rows;
    TraceSummary summary;
};

/// Feeds the stream through every configured prior and checks, at every n,
/// each regret bound, the aggregate bound, the conditional and lemma bounds
/// of the Robbins mixture, and the envelope facts. Rows are emitted at
/// checkpoints and at any n that violates a bound.
TraceResult run_trace(const ExperimentConfig& config);

/// Writes rows with the standard column set; empty field when not applicable.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
std::string trace_csv_header();

struct GrowthEntry {
    std::string label;  // prior name or "aggregate"
    LogWealth log_wealth = 0.0;
    double per_n = 0.0;
    double per_v = 0.0;
};

struct GrowthResult {
    std::uint64_t n = 0;
    double s = 0.0;
    double v = 0.0;
    std::vector<GrowthEntry> entries;
    double empirical_klinf = 0.0;            // ln W* / n
    std::optional<double> klinf_reference;   // KL_inf(Q, m0)
    std::optional<double> normalized_reference;  // KL_inf / (Var + (m-m0)^2)
    std::optional<double> half_normalized_reference;
    /// Whether min{m0,1-m0}/5 < |m-m0| / (Var + (m-m0)^2): the regime where the
    /// Robbins mixture can lose up to half the growth rate.
    std::optional<bool> half_rate_regime;

    const GrowthEntry* find(const std::string& label) const;
};

GrowthResult growth_rate(const ExperimentConfig& config);

/// min{m0,1-m0}/5 < |m-m0| / (Var + (m-m0)^2); false when the denominator is 0.
bool half_rate_condition(double mean, double variance, const MarketConfig& cfg);

struct LilRow {
    std::uint64_t n = 0;
    double s = 0.0;
    double v = 0.0;
    bool skipped = true;  // V <= e: the ratios are undefined
    double lil_ratio = 0.0;     // |S| / sqrt(2 V ln ln V)
    double regret_ratio = 0.0;  // Robbins regret / ln ln V
};

struct LilResult {
    std::vector<LilRow> rows;
    /// Max of the LIL ratio over every n >= window_start with V > e.
    std::optional<double> max_lil_ratio;
    std::optional<double> final_regret_ratio;
};

/// LIL witness trace for the Robbins mixture on one replication.
LilResult lil_trace(const ExperimentConfig& config, std::uint64_t window_start = 1000);

/// LIL ratio |S| / sqrt(2 V ln ln V); empty when V <= e.
std::optional<double> lil_ratio(double s, double v);

struct CoverageEntry {
    std::string label;  // prior name, "aggregate", or "tracked"
    std::uint64_t exceed = 0;
    std::uint64_t replications = 0;

    double frequency() const { return replications ? static_cast<double>(exceed) / replications : 0.0; }
};

struct CoverageResult {
    double alpha = 0.05;
    std::vector<CoverageEntry> entries;
    /// alpha + 3 sqrt(alpha (1 - alpha) / R).
    double tolerance_limit = 0.0;

    const CoverageEntry* find(const std::string& label) const;
};

/// Fraction of replications whose running mixture wealth ever exceeds 1/alpha,
/// per prior, for the aggregate (uniform and robbins), and for the adversary's
/// own tracked mixture when the stream is nsm-adv. One pass serves every alpha.
std::vector<CoverageResult> ville_coverage(const ExperimentConfig& config, const std::vector<double>& alphas);

/// The fixed check corpus: Bernoulli p = 0.1..0.9, Bernoulli(m0),
/// Bernoulli(m0 + 0.02), Beta(2,5), a three-point discrete law, Constant(0),
/// Constant(1) and PointMass(1), cycled over m0 in {0.25, 0.5, 0.7}.
struct CorpusEntry {
    MarketConfig market;
    StreamSpec stream;
    std::uint64_t seed = 0;
};

std::vector<CorpusEntry> check_corpus(std::size_t count, std::uint64_t base_seed = 1000);

struct CorpusReport {
    TraceSummary summary;
    std::uint64_t runs = 0;
    std::uint64_t violation_rows = 0;
    std::vector<std::string> failures;  // first few failing runs, human readable
};

/// Runs run_trace (all three priors, certification on) over the corpus.
/// `progress` is called after each run with (done, total).
CorpusReport run_corpus(const std::vector<CorpusEntry>& corpus, std::uint64_t horizon, std::size_t nodes_per_side,
                        double alpha, unsigned threads = 0,
                        const std::function<void(std::size_t, std::size_t)>& progress = {});

/// Calls fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace villebet
