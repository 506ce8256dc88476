// villebet: mixture wealth experiments on bounded data.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "villebet/experiments.hpp"

namespace {

using json = nlohmann::json;
using namespace villebet;

struct Options {
    std::string config;
    double m0 = 0.5;
    std::vector<std::string> priors{"all"};
    std::string stream = "bernoulli:p=0.5";
    std::uint64_t seed = 1;
    std::uint64_t horizon = 1000;
    double alpha = 0.05;
    std::vector<double> alphas;
    double s0 = 0.5;
    std::size_t nodes_per_side = kDefaultNodesPerSide;
    std::uint64_t replications = 1;
    unsigned threads = 0;
    std::string out = "-";
    std::uint64_t runs = 200;
    std::uint64_t window = 1000;
};

// Flags shared by every subcommand.
void add_common(CLI::App& sub, Options& o) {
    sub.add_option("--config", o.config, "JSON file whose keys mirror the flags; flags win");
    sub.add_option("--m0", o.m0, "Null mean m0 in (0,1)");
    sub.add_option("--prior", o.priors, "uniform, robbins, oj or all (repeatable, comma separated)")->delimiter(',');
    sub.add_option("--stream", o.stream, "Stream spec, e.g. bernoulli:p=0.8");
    sub.add_option("--seed", o.seed, "Seed");
    sub.add_option("--horizon", o.horizon, "Number of observations");
    sub.add_option("--alpha", o.alpha, "Ville level in (0,1)");
    sub.add_option("--s0", o.s0, "Aggregate weight of the uniform mixture");
    sub.add_option("--nodes-per-side", o.nodes_per_side, "Quadrature nodes per sign side");
    sub.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

// Fills every option not given on the command line from the JSON config.
void apply_config(CLI::App& sub, Options& o) {
    if (o.config.empty()) {
        return;
    }
    std::ifstream in(o.config);
    if (!in) {
        throw std::runtime_error("cannot open config file " + o.config);
    }
    const json j = json::parse(in);
    const auto given = [&](const std::string& flag) { return sub.get_option_no_throw(flag) && sub.count(flag) > 0; };
    const auto take = [&](const char* key, const std::string& flag, auto& target) {
        if (!given(flag)) {
            std::string alt = key;
            std::replace(alt.begin(), alt.end(), '_', '-');
            if (j.contains(key)) {
                j.at(key).get_to(target);
            } else if (j.contains(alt)) {
                j.at(alt).get_to(target);
            }
        }
    };
    take("m0", "--m0", o.m0);
    take("stream", "--stream", o.stream);
    take("seed", "--seed", o.seed);
    take("horizon", "--horizon", o.horizon);
    take("alpha", "--alpha", o.alpha);
    take("s0", "--s0", o.s0);
    take("nodes_per_side", "--nodes-per-side", o.nodes_per_side);
    take("threads", "--threads", o.threads);
    if (sub.get_option_no_throw("--replications")) take("replications", "--replications", o.replications);
    if (sub.get_option_no_throw("--out")) take("out", "--out", o.out);
    if (sub.get_option_no_throw("--runs")) take("runs", "--runs", o.runs);
    if (sub.get_option_no_throw("--alphas")) take("alphas", "--alphas", o.alphas);
    if (!given("--prior") && j.contains("prior")) {
        o.priors.clear();
        if (j.at("prior").is_array()) {
            j.at("prior").get_to(o.priors);
        } else {
            o.priors.push_back(j.at("prior").get<std::string>());
        }
    }
}

ExperimentConfig make_config(const Options& o) {
    ExperimentConfig c;
    c.market = make_market(o.m0);
    c.stream = parse_stream_spec(o.stream);
    c.seed = o.seed;
    c.horizon = o.horizon;
    c.priors.clear();
    for (const auto& name : o.priors) {
        if (name == "all") {
            c.priors = {PriorKind::Uniform, PriorKind::Robbins, PriorKind::OrabonaJun};
            break;
        }
        const PriorKind kind = parse_prior_kind(name);
        if (!c.has(kind)) {
            c.priors.push_back(kind);
        }
    }
    c.alpha = o.alpha;
    c.s0 = o.s0;
    c.nodes_per_side = o.nodes_per_side;
    c.replications = o.replications;
    c.threads = o.threads;
    c.checkpoints = geometric_checkpoints(o.horizon);
    c.validate();
    return c;
}

// Opens --out ("-" is stdout) and hands the stream to `write`.
template <class Write>
void with_output(const std::string& path, Write&& write) {
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream file(path);
    if (!file) {
        throw std::runtime_error("cannot write " + path);
    }
    write(file);
}

json summary_json(const TraceSummary& s) {
    return json{{"steps", s.steps},
                {"violations", s.violations},
                {"min_slack", s.min_slack},
                {"eps_quad", s.eps_quad},
                {"robbins_branches", s.robbins_branches},
                {"oj_branches", s.oj_branches}};
}

int cmd_trace(const Options& o) {
    const ExperimentConfig c = make_config(o);
    const TraceResult result = run_trace(c);
    with_output(o.out, [&](std::ostream& out) { write_trace_csv(out, result.rows); });
    const auto bad = std::count_if(result.rows.begin(), result.rows.end(), [](const TraceRow& r) { return r.violation; });
    std::cerr << summary_json(result.summary).dump() << '\n';
    if (bad > 0) {
        std::cerr << bad << " violation row(s)\n";
        return 1;
    }
    return 0;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_growth(const Options& o) {
    ExperimentConfig c = make_config(o);
    const GrowthResult g = growth_rate(c);
    json j{{"n", g.n},
           {"S_n", g.s},
           {"V_n", g.v},
           {"empirical_klinf", g.empirical_klinf},
           {"klinf_reference", optional_json(g.klinf_reference)},
           {"normalized_reference", optional_json(g.normalized_reference)},
           {"half_normalized_reference", optional_json(g.half_normalized_reference)},
           {"half_rate_regime", g.half_rate_regime ? json(*g.half_rate_regime) : json(nullptr)}};
    for (const auto& e : g.entries) {
        j["priors"][e.label] = {{"log_wealth", e.log_wealth}, {"per_n", e.per_n}, {"per_v", e.per_v}};
    }
    with_output(o.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    return 0;
}

int cmd_lil(const Options& o) {
    const ExperimentConfig c = make_config(o);
    const LilResult r = lil_trace(c, o.window);
    with_output(o.out, [&](std::ostream& out) {
        out << "n,S_n,V_n,lil_ratio,regret_ratio,skipped\n";
        char buf[128];
        for (const auto& row : r.rows) {
            out << row.n << ',';
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,", row.s, row.v);
            out << buf;
            if (!row.skipped) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g", row.lil_ratio, row.regret_ratio);
                out << buf;
            } else {
                out << ',';
            }
            out << ',' << (row.skipped ? "true" : "false") << '\n';
        }
    });
    std::cerr << json{{"max_lil_ratio", optional_json(r.max_lil_ratio)},
                      {"final_regret_ratio", optional_json(r.final_regret_ratio)}}
                     .dump()
              << '\n';
    return 0;
}

int cmd_ville(const Options& o) {
    const ExperimentConfig c = make_config(o);
    const std::vector<double> alphas = o.alphas.empty() ? std::vector<double>{o.alpha} : o.alphas;
    const auto results = ville_coverage(c, alphas);
    json j = json::array();
    bool exceeded = false;
    for (const auto& r : results) {
        json entry{{"alpha", r.alpha}, {"limit", r.tolerance_limit}};
        for (const auto& e : r.entries) {
            entry["exceedance"][e.label] = e.frequency();
            exceeded = exceeded || e.frequency() > r.tolerance_limit;
        }
        j.push_back(entry);
    }
    with_output(o.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    return exceeded ? 1 : 0;
}

int cmd_check_bounds(const Options& o) {
    const auto corpus = check_corpus(o.runs, o.seed);
    const CorpusReport report = run_corpus(corpus, o.horizon, o.nodes_per_side, o.alpha, o.threads,
                                           [](std::size_t done, std::size_t total) {
                                               std::cerr << "\r" << done << "/" << total << std::flush;
                                           });
    std::cerr << '\n';
    json j = summary_json(report.summary);
    j["runs"] = report.runs;
    j["violation_rows"] = report.violation_rows;
    j["failures"] = report.failures;
    with_output(o.out, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
    return report.summary.total_violations() > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixture wealth processes for bounded data: regret traces and checks"};
    app.require_subcommand(1);
    Options o;

    auto* trace = app.add_subcommand("trace", "Per-checkpoint CSV trace with every bound asserted at every n");
    add_common(*trace, o);
    trace->add_option("--replications", o.replications, "Independent replications");
    trace->add_option("--out", o.out, "CSV output file (- for stdout)");

    auto* growth = app.add_subcommand("growth", "Growth rates at the horizon against KL_inf");
    add_common(*growth, o);
    growth->add_option("--out", o.out, "JSON output file (- for stdout)");

    auto* lil = app.add_subcommand("lil", "LIL ratio and Robbins regret / ln ln V trace");
    add_common(*lil, o);
    lil->add_option("--window", o.window, "Smallest n entering the max LIL ratio");
    lil->add_option("--out", o.out, "CSV output file (- for stdout)");

    auto* ville = app.add_subcommand("ville", "Monte Carlo exceedance of 1/alpha");
    add_common(*ville, o);
    ville->add_option("--replications", o.replications, "Independent replications");
    ville->add_option("--alphas", o.alphas, "Several levels at once (comma separated)")->delimiter(',');
    ville->add_option("--out", o.out, "JSON output file (- for stdout)");

    auto* check = app.add_subcommand("check-bounds", "Every invariant over the fixed random-stream corpus");
    add_common(*check, o);
    check->add_option("--runs", o.runs, "Corpus size");
    check->add_option("--out", o.out, "JSON output file (- for stdout)");

    CLI11_PARSE(app, argc, argv);
    try {
        for (auto* sub : app.get_subcommands()) {
            if (sub == check && sub->count("--horizon") == 0) {
                o.horizon = 10000;
            }
            apply_config(*sub, o);
            if (sub == trace) return cmd_trace(o);
            if (sub == growth) return cmd_growth(o);
            if (sub == lil) return cmd_lil(o);
            if (sub == ville) return cmd_ville(o);
            if (sub == check) return cmd_check_bounds(o);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
