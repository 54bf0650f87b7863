#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tomsim/episode.hpp"
#include "tomsim/errors.hpp"
#include "tomsim/smcc.hpp"

using namespace tomsim;

namespace {

// Nothing moves and nobody is noisy, so every disparity stays at zero.
const char* kStatic =
    "[map]\n"
    "cell_size 0.5\n"
    "origin 0 0\n"
    "grid\n"
    "..........\n"
    "..........\n"
    "..........\n"
    "end\n"
    "[objects]\n"
    "cup \"cup\" 0.75 0.75 0.5\n"
    "plate \"plate\" 2.25 0.75 0\n"
    "[agents]\n"
    "agent human\n"
    "pose 1.25 0.75 0 0\n"
    "fov 3.2 5\n"
    "end\n"
    "agent robot\n"
    "pose 0.25 0.75 0 0\n"
    "fov 3.2 5\n"
    "end\n"
    "[config]\n"
    "dt 0.5\n"
    "duration 4\n";

// The human faces a tight cone away from the room while a cup hops 3 m in
// front of the robot, leaving the human's estimated map stale.
const char* kStaleCup =
    "[map]\n"
    "cell_size 0.5\n"
    "origin 0 0\n"
    "grid\n"
    "..........\n"
    "..........\n"
    "..........\n"
    "end\n"
    "[objects]\n"
    "cup \"cup\" 0.75 0.75 0.5\n"
    "plate \"plate\" 1.25 1.25 0\n"
    "[agents]\n"
    "agent human\n"
    "pose 4.75 0.25 0 0\n"
    "fov 0.2 0.6\n"
    "end\n"
    "agent robot\n"
    "pose 2.25 1.25 0 3.141592\n"
    "fov 3.2 6\n"
    "end\n"
    "[events]\n"
    "relocate 1 cup 3.75 0.75 0.5\n"
    "[config]\n"
    "dt 0.5\n"
    "duration 4\n"
    "assist 3.6 \"setting the table\"\n";

RelevanceMap table_relevance() {
    std::istringstream in("setting the table: cup, plate, fork\n");
    return RelevanceMap::load(in);
}

std::filesystem::path fresh_dir(const char* tag) {
    const auto dir = std::filesystem::temp_directory_path() /
                     (std::string("tomsim_test_") + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("a static scenario holds every disparity at zero") {
    const EpisodeResult result = run_episode(parse_scenario(kStatic), {});
    REQUIRE(result.rows.size() == 8);
    for (const MetricsRow& row : result.rows) {
        CHECK(row.inferred_vs_human == 0.0);
        CHECK(row.human_vs_true == 0.0);
        CHECK(row.robot_vs_true == 0.0);
        CHECK(row.person_visible);
        CHECK(row.events_applied == 0);
    }
    CHECK(result.rows.front().frame == 1);
    CHECK(result.rows.front().t == 0.5);
    CHECK(result.rows.back().frame == 8);
    CHECK(result.final_time == result.rows.back().t);
    CHECK(result.snapshots.empty());
}

TEST_CASE("frame counts follow duration over dt with a ragged tail") {
    ScenarioDoc doc = parse_scenario(kStatic);
    doc.config.duration = 1.1;
    CHECK(run_episode(doc, {}).rows.size() == 3);
    doc.config.duration = 0.0;
    CHECK(run_episode(doc, {}).rows.empty());
    doc.config.duration = 2.0;
    doc.config.dt = 0.4;
    CHECK(run_episode(doc, {}).rows.size() == 5);
}

TEST_CASE("repeat runs are byte-stable") {
    const ScenarioDoc doc = parse_scenario(kStaleCup);
    RunConfig cfg;
    cfg.seed = 9;
    cfg.relevance = nullptr;
    ScenarioDoc quiet = doc;
    quiet.config.assists.clear();
    quiet.config.noise.sigma_pos = 0.08;
    quiet.config.noise.p_drop_object = 0.2;
    quiet.config.human_ground_truth = false;
    const EpisodeResult a = run_episode(quiet, cfg);
    const EpisodeResult b = run_episode(quiet, cfg);
    CHECK(metrics_csv(a.rows) == metrics_csv(b.rows));
    CHECK(serialize_belief(a.robot, a.final_time) == serialize_belief(b.robot, b.final_time));
    CHECK(serialize_belief(a.inferred, a.final_time) ==
          serialize_belief(b.inferred, b.final_time));

    RunConfig other = cfg;
    other.seed = 10;
    const EpisodeResult c = run_episode(quiet, other);
    CHECK(metrics_csv(a.rows) != metrics_csv(c.rows));
}

TEST_CASE("snapshots replay into the published rows") {
    ScenarioDoc doc = parse_scenario(kStaleCup);
    doc.config.assists.clear();
    RunConfig cfg;
    cfg.capture_snapshots = true;
    const EpisodeResult result = run_episode(doc, cfg);
    REQUIRE(result.snapshots.size() == result.rows.size());
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const FrameSnapshot& snap = result.snapshots[i];
        const MetricsRow& row = result.rows[i];
        CHECK(snap.frame == row.frame);
        CHECK(snap.t == row.t);
        const MeritTriple merits =
            figures_of_merit(snap.inferred, snap.human, snap.robot, snap.truth);
        CHECK(merits.inferred_vs_human == row.inferred_vs_human);
        CHECK(merits.human_vs_true == row.human_vs_true);
        CHECK(merits.robot_vs_true == row.robot_vs_true);
        CHECK(snap.person_visible == row.person_visible);
        CHECK(snap.events_applied == row.events_applied);
    }
    // the cup hop is visible to the robot but not the human
    const MetricsRow& last = result.rows.back();
    CHECK(last.events_applied == 1);
    CHECK(last.robot_vs_true == 0.0);
    CHECK(last.human_vs_true > 1.0);
    CHECK(last.inferred_vs_human == 0.0);
}

TEST_CASE("the csv spells rows in a fixed shape") {
    const EpisodeResult result = run_episode(parse_scenario(kStatic), {});
    const std::string csv = metrics_csv(result.rows);
    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line ==
          "frame,t,smcc_inferred_vs_human,smcc_human_vs_true,smcc_robot_vs_true,"
          "person_visible,events_applied");
    REQUIRE(std::getline(lines, line));
    CHECK(line == "1,0.500000,0.000000,0.000000,0.000000,1,0");
    std::size_t rows = 1;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == result.rows.size());
}

TEST_CASE("an episode needs a robot and, with checkpoints, a relevance map") {
    ScenarioDoc doc = parse_scenario(kStatic);
    doc.agents.erase(doc.agents.begin() + 1);
    CHECK_THROWS_WITH_AS(run_episode(doc, {}), doctest::Contains("robot"), ValidationError);

    const ScenarioDoc with_assist = parse_scenario(kStaleCup);
    CHECK_THROWS_AS(run_episode(with_assist, {}), ValidationError);
}

TEST_CASE("assist checkpoints fire once their time arrives") {
    const ScenarioDoc doc = parse_scenario(kStaleCup);
    const RelevanceMap relevance = table_relevance();
    RunConfig cfg;
    cfg.relevance = &relevance;
    const EpisodeResult result = run_episode(doc, cfg);
    REQUIRE(result.assists.size() == 1);
    const AssistOutcome& outcome = result.assists.front();
    CHECK(outcome.at == 3.6);
    CHECK(outcome.fired_t == 4.0);
    CHECK(outcome.notify.activity == "setting the table");
    REQUIRE(outcome.notify.objects.size() == 1);
    CHECK(outcome.notify.objects.front().id == "cup");

    // a checkpoint past the horizon never fires
    ScenarioDoc late = doc;
    late.config.assists.front().at = 100.0;
    CHECK(run_episode(late, cfg).assists.empty());
}

TEST_CASE("write_outputs lays down the expected file set") {
    const ScenarioDoc doc = parse_scenario(kStaleCup);
    const RelevanceMap relevance = table_relevance();
    RunConfig cfg;
    cfg.relevance = &relevance;
    const EpisodeResult result = run_episode(doc, cfg);

    const auto plain = fresh_dir("plain");
    write_outputs(result, plain.string(), false);
    CHECK(slurp(plain / "metrics.csv") == metrics_csv(result.rows));
    CHECK(slurp(plain / "truth.belief") ==
          serialize_belief(result.truth, result.final_time));
    CHECK(std::filesystem::exists(plain / "robot.belief"));
    CHECK(std::filesystem::exists(plain / "human.belief"));
    CHECK(std::filesystem::exists(plain / "inferred.belief"));
    CHECK(!std::filesystem::exists(plain / "plot.svg"));
    const std::string log = slurp(plain / "assist.log");
    CHECK(log == "4.000000 \"setting the table\" cup\n");

    const auto plotted = fresh_dir("plotted");
    write_outputs(result, plotted.string(), true);
    const std::string svg = slurp(plotted / "plot.svg");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<polyline") != std::string::npos);

    ScenarioDoc quiet = doc;
    quiet.config.assists.clear();
    const auto bare = fresh_dir("bare");
    write_outputs(run_episode(quiet, {}), bare.string(), false);
    CHECK(!std::filesystem::exists(bare / "assist.log"));

    std::filesystem::remove_all(plain);
    std::filesystem::remove_all(plotted);
    std::filesystem::remove_all(bare);
}

TEST_CASE("ablation grids parse seeds and cells") {
    const AblationSpec spec = parse_ablation(
        "# comparison grid\n"
        "seeds 7 8\n"
        "cell baseline\n"
        "cell no_inference trajectory_inference=off\n"
        "cell noisy sigma_pos=0.2 human_perception=noisy\n");
    CHECK(spec.seeds == std::vector<std::uint64_t>{7, 8});
    REQUIRE(spec.cells.size() == 3);
    CHECK(spec.cells[0].overrides.empty());
    CHECK(spec.cells[1].overrides.front() ==
          std::pair<std::string, std::string>{"trajectory_inference", "off"});
    CHECK(spec.cells[2].overrides.size() == 2);

    CHECK(parse_ablation("cell only\n").seeds == std::vector<std::uint64_t>{0});

    CHECK_THROWS_AS(parse_ablation("seeds 1\nseeds 2\ncell a\n"), ParseError);
    CHECK_THROWS_AS(parse_ablation("seeds one\ncell a\n"), ParseError);
    CHECK_THROWS_AS(parse_ablation("seeds\ncell a\n"), ParseError);
    CHECK_THROWS_AS(parse_ablation("cell\n"), ParseError);
    CHECK_THROWS_AS(parse_ablation("cell a\ncell a\n"), ParseError);
    CHECK_THROWS_AS(parse_ablation("cell a dt\n"), ParseError);
    CHECK_THROWS_AS(parse_ablation("rows 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse_ablation("seeds 3\n"), ValidationError);
    CHECK_THROWS_AS(load_ablation("/no/such/grid.txt"), ValidationError);
}

TEST_CASE("overrides rewrite config knobs and reject junk") {
    const ScenarioDoc doc = parse_scenario(kStatic);
    const ScenarioDoc flipped = apply_overrides(
        doc, {{"trajectory_inference", "off"},
              {"human_perception", "noisy"},
              {"dt", "0.25"},
              {"sigma_heading", "0.05"}});
    CHECK(!flipped.config.trajectory_inference);
    CHECK(!flipped.config.human_ground_truth);
    CHECK(flipped.config.dt == 0.25);
    CHECK(flipped.config.noise.sigma_heading == 0.05);
    CHECK(doc.config.trajectory_inference);  // input untouched

    CHECK_THROWS_AS(apply_overrides(doc, {{"dt", "zero"}}), ValidationError);
    CHECK_THROWS_AS(apply_overrides(doc, {{"dt", "0"}}), ValidationError);
    CHECK_THROWS_AS(apply_overrides(doc, {{"tau", "-1"}}), ValidationError);
    CHECK_THROWS_AS(apply_overrides(doc, {{"p_drop_object", "2"}}), ValidationError);
    CHECK_THROWS_AS(apply_overrides(doc, {{"speed", "1"}}), ValidationError);
    CHECK_THROWS_AS(apply_overrides(doc, {{"trajectory_inference", "maybe"}}),
                    ValidationError);
}

TEST_CASE("an ablation run reports one mean per cell and seed") {
    ScenarioDoc doc = parse_scenario(kStaleCup);
    doc.config.assists.clear();
    AblationSpec spec;
    spec.seeds = {3, 4};
    spec.cells.push_back({"baseline", {}});
    spec.cells.push_back({"off", {{"trajectory_inference", "off"}}});
    const auto rows = run_ablation(doc, spec, nullptr);
    REQUIRE(rows.size() == 2);
    for (const AblationRow& row : rows) {
        REQUIRE(row.per_seed.size() == 2);
        CHECK(row.mean == (row.per_seed[0] + row.per_seed[1]) / 2.0);
    }

    // the baseline cell matches a direct run of the same seed
    RunConfig cfg;
    cfg.seed = 3;
    const EpisodeResult direct = run_episode(doc, cfg);
    double sum = 0.0;
    for (const MetricsRow& row : direct.rows) sum += row.inferred_vs_human;
    CHECK(rows[0].per_seed[0] == sum / static_cast<double>(direct.rows.size()));

    const auto again = run_ablation(doc, spec, nullptr);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].per_seed == again[i].per_seed);
    }

    const std::string table = ablation_table(spec, rows);
    CHECK(table.find("cell") == 0);
    CHECK(table.find("seed_3") != std::string::npos);
    CHECK(table.find("seed_4") != std::string::npos);
    CHECK(table.find("baseline") != std::string::npos);
    CHECK(table.find("mean") != std::string::npos);
}
