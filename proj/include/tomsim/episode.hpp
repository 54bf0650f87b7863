#ifndef TOMSIM_EPISODE_HPP
#define TOMSIM_EPISODE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tomsim/assist.hpp"
#include "tomsim/belief.hpp"
#include "tomsim/scenario.hpp"
#include "tomsim/tom.hpp"

namespace tomsim {

// One line of metrics.csv: the three disparity curves plus bookkeeping.
struct MetricsRow {
    std::uint64_t frame = 0;
    double t = 0.0;
    double inferred_vs_human = 0.0;
    double human_vs_true = 0.0;
    double robot_vs_true = 0.0;
    bool person_visible = false;
    std::uint64_t events_applied = 0;
};

// Full belief state at one frame, for callers that want to recompute or
// inspect the curves.
struct FrameSnapshot {
    std::uint64_t frame = 0;
    double t = 0.0;
    BeliefState robot;
    BeliefState human;
    BeliefState inferred;
    BeliefState truth;
    bool person_visible = false;
    std::uint64_t events_applied = 0;
};

struct AssistOutcome {
    double at = 0.0;       // checkpoint time from the scenario
    double fired_t = 0.0;  // clock of the frame that ran it
    NotifySet notify;
};

struct RunConfig {
    std::uint64_t seed = 0;
    bool capture_snapshots = false;
    // Required when the scenario declares assist checkpoints.
    const RelevanceMap* relevance = nullptr;
    // Optional picker consulted ahead of the relevance map.
    const ExternalReasoner* reasoner = nullptr;
};

struct EpisodeResult {
    std::vector<MetricsRow> rows;
    std::vector<FrameSnapshot> snapshots;
    std::vector<AssistOutcome> assists;
    BeliefState robot;
    BeliefState human;
    BeliefState inferred;
    BeliefState truth;
    double final_time = 0.0;
};

// Runs the scenario end to end. Each frame advances the world, senses for the
// robot, folds the batch into the robot map, lets the person update their own
// map from what they can see, then processes any person sighting into the
// inferred map. Fixed seed in, byte-stable results out.
EpisodeResult run_episode(const ScenarioDoc& doc, const RunConfig& cfg);

std::string metrics_csv(const std::vector<MetricsRow>& rows);

// Standalone SVG line chart of the three curves.
std::string plot_svg(const std::vector<MetricsRow>& rows);

// Writes metrics.csv, final belief dumps (truth/robot/human/inferred.belief),
// an assist log when checkpoints fired, and optionally plot.svg.
void write_outputs(const EpisodeResult& result, const std::string& dir, bool with_plot);

// A named set of config overrides, run once per seed.
struct AblationCell {
    std::string name;
    std::vector<std::pair<std::string, std::string>> overrides;
};

struct AblationSpec {
    std::vector<std::uint64_t> seeds;
    std::vector<AblationCell> cells;
};

// Grid file: an optional `seeds 7 8 9` line, then `cell <name> [key=value...]`
// lines. Overrides accept the [config] scalar keys plus trajectory_inference
// and human_perception.
AblationSpec parse_ablation(const std::string& text);
AblationSpec load_ablation(const std::string& path);

ScenarioDoc apply_overrides(ScenarioDoc doc,
                            const std::vector<std::pair<std::string, std::string>>& overrides);

struct AblationRow {
    std::string name;
    std::vector<double> per_seed;  // mean inferred-vs-human disparity, one per seed
    double mean = 0.0;
};

std::vector<AblationRow> run_ablation(const ScenarioDoc& doc, const AblationSpec& spec,
                                      const RelevanceMap* relevance = nullptr);

std::string ablation_table(const AblationSpec& spec, const std::vector<AblationRow>& rows);

}  // namespace tomsim

#endif
