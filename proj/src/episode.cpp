#include "tomsim/episode.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "tomsim/errors.hpp"
#include "tomsim/rng.hpp"
#include "tomsim/smcc.hpp"
#include "tomsim/world.hpp"

namespace tomsim {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::uint64_t frame_count(double duration, double dt) {
    const double quotient = duration / dt;
    if (quotient <= 0.0) return 0;
    return static_cast<std::uint64_t>(std::ceil(quotient - 1e-9));
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
}

}  // namespace

EpisodeResult run_episode(const ScenarioDoc& doc, const RunConfig& cfg) {
    if (!find_agent(doc, "robot"))
        throw ValidationError("scenario needs an agent named 'robot'");
    const ScenarioAgent* human_decl = find_agent(doc, "human");
    const FovParams person_fov = human_decl ? human_decl->fov : FovParams{};

    auto checkpoints = doc.config.assists;
    std::stable_sort(checkpoints.begin(), checkpoints.end(),
                     [](const AssistCheckpoint& a, const AssistCheckpoint& b) {
                         return a.at < b.at;
                     });
    if (!checkpoints.empty() && cfg.relevance == nullptr)
        throw ValidationError("scenario declares assist checkpoints but no relevance map given");

    WorldState world = build_world(doc);
    const BeliefState initial = world.truth;
    BeliefState human_belief = initial;
    TomState tom = make_tom(initial);

    Rng robot_rng = Rng::stream(cfg.seed, 1);
    Rng human_rng = Rng::stream(cfg.seed, 2);
    Rng person_rng = Rng::stream(cfg.seed, 3);

    PerceptionNoise human_noise{};
    if (!doc.config.human_ground_truth) human_noise = doc.config.noise;

    const double dt = doc.config.dt;
    const std::uint64_t frames = frame_count(doc.config.duration, dt);

    EpisodeResult result;
    result.rows.reserve(frames);
    std::size_t next_checkpoint = 0;

    for (std::uint64_t f = 1; f <= frames; ++f) {
        world = step(world, dt);
        const AgentState* robot = world.agent("robot");

        const ObservationBatch robot_obs =
            sense_objects(world, *robot, doc.config.noise, robot_rng);
        tom = update_robot_belief(tom, robot_obs);

        const AgentState* human = world.agent("human");
        if (human != nullptr && human->present) {
            const ObservationBatch human_obs = sense_objects(world, *human, human_noise, human_rng);
            human_belief = resolve_update(human_belief, human_obs).state;
        }

        const std::optional<Pose> person =
            sense_person(world, *robot, doc.config.noise, person_rng);
        if (person.has_value()) {
            SightingResult sighted = on_person_sighting(tom, *person, world.clock, world.grid,
                                                        person_fov,
                                                        doc.config.trajectory_inference);
            tom = std::move(sighted.state);
        }

        const MeritTriple merits =
            figures_of_merit(tom.inferred, human_belief, tom.robot_belief, world.truth);
        MetricsRow row;
        row.frame = f;
        row.t = world.clock;
        row.inferred_vs_human = merits.inferred_vs_human;
        row.human_vs_true = merits.human_vs_true;
        row.robot_vs_true = merits.robot_vs_true;
        row.person_visible = person.has_value();
        row.events_applied = world.applied_events;
        result.rows.push_back(row);

        if (cfg.capture_snapshots) {
            FrameSnapshot snap;
            snap.frame = f;
            snap.t = world.clock;
            snap.robot = tom.robot_belief;
            snap.human = human_belief;
            snap.inferred = tom.inferred;
            snap.truth = world.truth;
            snap.person_visible = person.has_value();
            snap.events_applied = world.applied_events;
            result.snapshots.push_back(std::move(snap));
        }

        while (next_checkpoint < checkpoints.size() &&
               checkpoints[next_checkpoint].at <= world.clock + 1e-9) {
            const UnawareSet unaware =
                unaware_objects(tom.robot_belief, tom.inferred, doc.config.tau);
            AssistOutcome outcome;
            outcome.at = checkpoints[next_checkpoint].at;
            outcome.fired_t = world.clock;
            outcome.notify = select_relevant(unaware, checkpoints[next_checkpoint].activity,
                                             *cfg.relevance, cfg.reasoner);
            result.assists.push_back(std::move(outcome));
            ++next_checkpoint;
        }
    }

    result.robot = tom.robot_belief;
    result.human = human_belief;
    result.inferred = tom.inferred;
    result.truth = world.truth;
    result.final_time = world.clock;
    return result;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << "frame,t,smcc_inferred_vs_human,smcc_human_vs_true,smcc_robot_vs_true,"
           "person_visible,events_applied\n";
    for (const auto& row : rows) {
        out << row.frame << "," << fmt(row.t) << "," << fmt(row.inferred_vs_human) << ","
            << fmt(row.human_vs_true) << "," << fmt(row.robot_vs_true) << ","
            << (row.person_visible ? 1 : 0) << "," << row.events_applied << "\n";
    }
    return out.str();
}

std::string plot_svg(const std::vector<MetricsRow>& rows) {
    constexpr double width = 800.0, height = 480.0;
    constexpr double left = 70.0, right = 780.0, top = 40.0, bottom = 420.0;

    double t_max = 1.0, y_max = 0.0;
    for (const auto& row : rows) {
        t_max = std::max(t_max, row.t);
        y_max = std::max({y_max, row.inferred_vs_human, row.human_vs_true, row.robot_vs_true});
    }
    y_max = std::max(y_max * 1.05, 1e-6);

    const auto px = [&](double t) { return left + (right - left) * (t / t_max); };
    const auto py = [&](double v) { return bottom - (bottom - top) * (v / y_max); };

    const auto polyline = [&](const char* color, double MetricsRow::* field) {
        std::ostringstream p;
        p << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i != 0) p << " ";
            p << fmt2(px(rows[i].t)) << "," << fmt2(py(rows[i].*field));
        }
        p << "\"/>\n";
        return p.str();
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double v = y_max * i / 4.0;
        const double y = py(v);
        out << "<line x1=\"" << left - 4 << "\" y1=\"" << fmt2(y) << "\" x2=\"" << left
            << "\" y2=\"" << fmt2(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << fmt2(y + 4)
            << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" << fmt2(v)
            << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double t = t_max * i / 4.0;
        const double x = px(t);
        out << "<line x1=\"" << fmt2(x) << "\" y1=\"" << bottom << "\" x2=\"" << fmt2(x)
            << "\" y2=\"" << bottom + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt2(x) << "\" y=\"" << bottom + 18
            << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" << fmt2(t)
            << "</text>\n";
    }
    out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 36
        << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
           "time (s)</text>\n";
    out << "<text x=\"16\" y=\"" << (top + bottom) / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 16 "
        << (top + bottom) / 2 << ")\">mean disparity (m/object)</text>\n";

    out << polyline("#1f77b4", &MetricsRow::inferred_vs_human);
    out << polyline("#d62728", &MetricsRow::human_vs_true);
    out << polyline("#2ca02c", &MetricsRow::robot_vs_true);

    const struct {
        const char* color;
        const char* label;
    } legend[] = {
        {"#1f77b4", "inferred vs human"},
        {"#d62728", "human vs true"},
        {"#2ca02c", "robot vs true"},
    };
    double ly = top + 4;
    for (const auto& item : legend) {
        out << "<line x1=\"" << right - 170 << "\" y1=\"" << fmt2(ly + 5) << "\" x2=\""
            << right - 146 << "\" y2=\"" << fmt2(ly + 5) << "\" stroke=\"" << item.color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << right - 140 << "\" y=\"" << fmt2(ly + 9)
            << "\" font-size=\"11\" font-family=\"sans-serif\">" << item.label << "</text>\n";
        ly += 16;
    }
    out << "</svg>\n";
    return out.str();
}

void write_outputs(const EpisodeResult& result, const std::string& dir, bool with_plot) {
    std::filesystem::create_directories(dir);
    const auto path = [&dir](const char* name) {
        return (std::filesystem::path(dir) / name).string();
    };

    write_file(path("metrics.csv"), metrics_csv(result.rows));
    write_file(path("truth.belief"), serialize_belief(result.truth, result.final_time));
    write_file(path("robot.belief"), serialize_belief(result.robot, result.final_time));
    write_file(path("human.belief"), serialize_belief(result.human, result.final_time));
    write_file(path("inferred.belief"), serialize_belief(result.inferred, result.final_time));

    if (!result.assists.empty()) {
        std::ostringstream log;
        for (const auto& a : result.assists) {
            log << fmt(a.fired_t) << " \"" << a.notify.activity << "\"";
            if (a.notify.objects.empty()) {
                log << " none";
            } else {
                for (const auto& obj : a.notify.objects) log << " " << obj.id;
            }
            log << "\n";
        }
        write_file(path("assist.log"), log.str());
    }

    if (with_plot) write_file(path("plot.svg"), plot_svg(result.rows));
}

AblationSpec parse_ablation(const std::string& text) {
    AblationSpec spec;
    std::istringstream in(text);
    std::string line;
    std::size_t ln = 0;
    bool seen_seeds = false;
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream toks(line);
        std::string head;
        if (!(toks >> head) || head[0] == '#') continue;
        if (head == "seeds") {
            if (seen_seeds) throw ParseError(ln, "duplicate seeds line");
            seen_seeds = true;
            std::string tok;
            while (toks >> tok) {
                try {
                    std::size_t pos = 0;
                    spec.seeds.push_back(std::stoull(tok, &pos, 10));
                    if (pos != tok.size()) throw std::invalid_argument("trailing");
                } catch (const std::exception&) {
                    throw ParseError(ln, "bad seed '" + tok + "'");
                }
            }
            if (spec.seeds.empty()) throw ParseError(ln, "seeds line lists no seeds");
            continue;
        }
        if (head == "cell") {
            AblationCell cell;
            if (!(toks >> cell.name)) throw ParseError(ln, "cell line needs a name");
            for (const auto& existing : spec.cells) {
                if (existing.name == cell.name)
                    throw ParseError(ln, "duplicate cell name '" + cell.name + "'");
            }
            std::string tok;
            while (toks >> tok) {
                const std::size_t eq = tok.find('=');
                if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
                    throw ParseError(ln, "override '" + tok + "' is not key=value");
                cell.overrides.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
            }
            spec.cells.push_back(std::move(cell));
            continue;
        }
        throw ParseError(ln, "expected 'seeds' or 'cell', got '" + head + "'");
    }
    if (spec.seeds.empty()) spec.seeds.push_back(0);
    if (spec.cells.empty()) throw ValidationError("ablation grid lists no cells");
    return spec;
}

AblationSpec load_ablation(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open ablation grid '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ablation(buf.str());
}

ScenarioDoc apply_overrides(ScenarioDoc doc,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    const auto as_number = [](const std::string& key, const std::string& value) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ValidationError("override " + key + "=" + value + " is not a number");
        }
    };

    for (const auto& [key, value] : overrides) {
        if (key == "trajectory_inference") {
            if (value == "on")
                doc.config.trajectory_inference = true;
            else if (value == "off")
                doc.config.trajectory_inference = false;
            else
                throw ValidationError("trajectory_inference takes 'on' or 'off'");
        } else if (key == "human_perception") {
            if (value == "ground_truth")
                doc.config.human_ground_truth = true;
            else if (value == "noisy")
                doc.config.human_ground_truth = false;
            else
                throw ValidationError("human_perception takes 'ground_truth' or 'noisy'");
        } else if (key == "dt") {
            doc.config.dt = as_number(key, value);
            if (!(doc.config.dt > 0.0)) throw ValidationError("dt must be positive");
        } else if (key == "duration") {
            doc.config.duration = as_number(key, value);
            if (doc.config.duration < 0.0) throw ValidationError("duration cannot be negative");
        } else if (key == "sigma_pos") {
            doc.config.noise.sigma_pos = as_number(key, value);
            if (doc.config.noise.sigma_pos < 0.0)
                throw ValidationError("sigma_pos cannot be negative");
        } else if (key == "sigma_heading") {
            doc.config.noise.sigma_heading = as_number(key, value);
            if (doc.config.noise.sigma_heading < 0.0)
                throw ValidationError("sigma_heading cannot be negative");
        } else if (key == "p_drop_object") {
            doc.config.noise.p_drop_object = as_number(key, value);
            if (doc.config.noise.p_drop_object < 0.0 || doc.config.noise.p_drop_object > 1.0)
                throw ValidationError("p_drop_object must lie in [0, 1]");
        } else if (key == "p_drop_person") {
            doc.config.noise.p_drop_person = as_number(key, value);
            if (doc.config.noise.p_drop_person < 0.0 || doc.config.noise.p_drop_person > 1.0)
                throw ValidationError("p_drop_person must lie in [0, 1]");
        } else if (key == "tau") {
            doc.config.tau = as_number(key, value);
            if (!(doc.config.tau > 0.0)) throw ValidationError("tau must be positive");
        } else {
            throw ValidationError("unknown override '" + key + "'");
        }
    }
    return doc;
}

std::vector<AblationRow> run_ablation(const ScenarioDoc& doc, const AblationSpec& spec,
                                      const RelevanceMap* relevance) {
    std::vector<AblationRow> rows;
    rows.reserve(spec.cells.size());
    for (const auto& cell : spec.cells) {
        const ScenarioDoc cell_doc = apply_overrides(doc, cell.overrides);
        std::vector<std::future<double>> futures;
        futures.reserve(spec.seeds.size());
        for (const std::uint64_t seed : spec.seeds) {
            futures.push_back(std::async(std::launch::async, [&cell_doc, relevance, seed] {
                RunConfig cfg;
                cfg.seed = seed;
                cfg.relevance = relevance;
                const EpisodeResult result = run_episode(cell_doc, cfg);
                if (result.rows.empty()) return 0.0;
                double sum = 0.0;
                for (const auto& row : result.rows) sum += row.inferred_vs_human;
                return sum / static_cast<double>(result.rows.size());
            }));
        }
        AblationRow row;
        row.name = cell.name;
        for (auto& fut : futures) row.per_seed.push_back(fut.get());
        double sum = 0.0;
        for (const double v : row.per_seed) sum += v;
        row.mean = row.per_seed.empty() ? 0.0 : sum / static_cast<double>(row.per_seed.size());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string ablation_table(const AblationSpec& spec, const std::vector<AblationRow>& rows) {
    std::size_t name_width = 4;
    for (const auto& row : rows) name_width = std::max(name_width, row.name.size());

    std::ostringstream out;
    out << "cell";
    out << std::string(name_width - 4 + 2, ' ');
    for (const std::uint64_t seed : spec.seeds) {
        char head[32];
        std::snprintf(head, sizeof(head), "seed_%llu", static_cast<unsigned long long>(seed));
        char padded[32];
        std::snprintf(padded, sizeof(padded), "%12s", head);
        out << padded << "  ";
    }
    out << "        mean\n";
    for (const auto& row : rows) {
        out << row.name << std::string(name_width - row.name.size() + 2, ' ');
        for (const double v : row.per_seed) {
            char cell[32];
            std::snprintf(cell, sizeof(cell), "%12.6f", v);
            out << cell << "  ";
        }
        char mean[32];
        std::snprintf(mean, sizeof(mean), "%12.6f", row.mean);
        out << mean << "\n";
    }
    return out.str();
}

}  // namespace tomsim
