#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tomsim/episode.hpp"
#include "tomsim/errors.hpp"
#include "tomsim/scenario.hpp"
#include "tomsim/smcc.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tomsim::ValidationError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct RunArgs {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string relevance;
    bool plot = false;
};

int cmd_run(const RunArgs& args) {
    const tomsim::ScenarioDoc doc = tomsim::load_scenario(args.scenario);

    std::string dir = args.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("TOMSIM_OUT");
        dir = (env != nullptr && env[0] != '\0') ? env : "out";
    }

    tomsim::RunConfig cfg;
    cfg.seed = args.seed;
    tomsim::RelevanceMap relevance;
    if (!doc.config.assists.empty()) {
        if (args.relevance.empty())
            throw tomsim::ValidationError(
                "scenario declares assist checkpoints; pass --relevance <file>");
        relevance = tomsim::RelevanceMap::load_file(args.relevance);
        cfg.relevance = &relevance;
    }

    const tomsim::EpisodeResult result = tomsim::run_episode(doc, cfg);
    tomsim::write_outputs(result, dir, args.plot);
    std::cout << "wrote " << result.rows.size() << " frames to " << dir << "\n";
    return 0;
}

struct DiffArgs {
    std::string belief_a;
    std::string belief_b;
    bool per_class = false;
    bool penalty_set = false;
    double penalty = 5.0;
};

int cmd_diff(const DiffArgs& args) {
    const tomsim::ParsedBelief a = tomsim::parse_belief(read_file(args.belief_a));
    const tomsim::ParsedBelief b = tomsim::parse_belief(read_file(args.belief_b));

    tomsim::SmccOptions options;
    if (args.penalty_set) {
        options.allow_cardinality_mismatch = true;
        options.unmatched_penalty = args.penalty;
    }
    const tomsim::SmccReport report = tomsim::smcc(a.state, b.state, options);

    std::cout << "objects " << report.object_count << "\n";
    std::cout << "total " << fmt(report.total) << "\n";
    std::cout << "mean " << fmt(report.mean) << "\n";
    if (args.per_class) {
        for (const auto& [cls, entry] : report.per_class) {
            std::cout << "class \"" << cls << "\" cost " << fmt(entry.cost) << " matched "
                      << entry.matched << "\n";
        }
    }
    return 0;
}

struct AssistArgs {
    std::string scenario;
    std::string activity;
    double at = 0.0;
    std::uint64_t seed = 0;
    bool tau_set = false;
    double tau = 0.5;
    std::string map_path = "data/relevance_map.txt";
    std::string reasoner_cmd;
    int reasoner_timeout_ms = 2000;
};

int cmd_assist(const AssistArgs& args) {
    tomsim::ScenarioDoc doc = tomsim::load_scenario(args.scenario);
    doc.config.assists.clear();
    doc.config.assists.push_back({args.at, args.activity});
    if (args.tau_set) {
        if (!(args.tau > 0.0)) throw tomsim::ValidationError("tau must be positive");
        doc.config.tau = args.tau;
    }

    const tomsim::RelevanceMap relevance = tomsim::RelevanceMap::load_file(args.map_path);
    std::optional<tomsim::ExternalReasoner> reasoner;
    if (!args.reasoner_cmd.empty())
        reasoner.emplace(args.reasoner_cmd, args.reasoner_timeout_ms);

    tomsim::RunConfig cfg;
    cfg.seed = args.seed;
    cfg.relevance = &relevance;
    cfg.reasoner = reasoner.has_value() ? &*reasoner : nullptr;

    const tomsim::EpisodeResult result = tomsim::run_episode(doc, cfg);
    if (result.assists.empty())
        throw tomsim::ValidationError("checkpoint time lies beyond the episode");

    for (const auto& outcome : result.assists) {
        std::cout << "activity \"" << outcome.notify.activity << "\" at " << fmt(outcome.fired_t)
                  << "\n";
        if (outcome.notify.objects.empty()) {
            std::cout << "nothing to report\n";
            continue;
        }
        for (const auto& obj : outcome.notify.objects) {
            std::cout << obj.id << " \"" << obj.cls << "\" " << fmt(obj.position.x) << " "
                      << fmt(obj.position.y) << " " << fmt(obj.position.z) << "\n";
        }
    }
    return 0;
}

struct AblateArgs {
    std::string scenario;
    std::string grid;
    std::string relevance;
};

int cmd_ablate(const AblateArgs& args) {
    const tomsim::ScenarioDoc doc = tomsim::load_scenario(args.scenario);
    const tomsim::AblationSpec spec = tomsim::load_ablation(args.grid);

    tomsim::RelevanceMap relevance;
    const tomsim::RelevanceMap* relevance_ptr = nullptr;
    if (!args.relevance.empty()) {
        relevance = tomsim::RelevanceMap::load_file(args.relevance);
        relevance_ptr = &relevance;
    }

    const auto rows = tomsim::run_ablation(doc, spec, relevance_ptr);
    std::cout << tomsim::ablation_table(spec, rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"household semantic-map and person-belief simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run a scenario and write its outputs");
    run->add_option("scenario", run_args.scenario, "scenario file")->required();
    run->add_option("--seed", run_args.seed, "episode seed (default 0)");
    run->add_option("--out", run_args.out_dir, "output directory (default $TOMSIM_OUT or ./out)");
    run->add_option("--relevance", run_args.relevance,
                    "relevance map, needed when the scenario declares assist checkpoints");
    run->add_flag("--plot", run_args.plot, "also write plot.svg");

    DiffArgs diff_args;
    auto* diff = app.add_subcommand("diff", "disparity between two belief dumps");
    diff->add_option("belief_a", diff_args.belief_a, "first belief file")->required();
    diff->add_option("belief_b", diff_args.belief_b, "second belief file")->required();
    diff->add_flag("--per-class", diff_args.per_class, "list per-class costs");
    auto* penalty_opt = diff->add_option(
        "--penalty", diff_args.penalty,
        "tolerate cardinality mismatches, charging this many meters per unmatched instance");

    AssistArgs assist_args;
    auto* assist = app.add_subcommand("assist", "report objects worth mentioning for an activity");
    assist->add_option("scenario", assist_args.scenario, "scenario file")->required();
    assist->add_option("--activity", assist_args.activity, "activity name")->required();
    assist->add_option("--at", assist_args.at, "checkpoint time in seconds")->required();
    assist->add_option("--seed", assist_args.seed, "episode seed (default 0)");
    auto* tau_opt = assist->add_option("--tau", assist_args.tau,
                                       "awareness distance threshold in meters");
    assist->add_option("--map", assist_args.map_path,
                       "relevance map file (default data/relevance_map.txt)");
    assist->add_option("--reasoner", assist_args.reasoner_cmd,
                       "shell command consulted for relevance before the map");
    assist->add_option("--reasoner-timeout", assist_args.reasoner_timeout_ms,
                       "reasoner reply timeout in milliseconds (default 2000)");

    AblateArgs ablate_args;
    auto* ablate = app.add_subcommand("ablate", "run a config grid and tabulate the results");
    ablate->add_option("scenario", ablate_args.scenario, "scenario file")->required();
    ablate->add_option("--grid", ablate_args.grid, "ablation grid file")->required();
    ablate->add_option("--relevance", ablate_args.relevance,
                       "relevance map for scenarios with assist checkpoints");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    diff_args.penalty_set = penalty_opt->count() > 0;
    assist_args.tau_set = tau_opt->count() > 0;

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (diff->parsed()) return cmd_diff(diff_args);
        if (assist->parsed()) return cmd_assist(assist_args);
        if (ablate->parsed()) return cmd_ablate(ablate_args);
    } catch (const tomsim::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
