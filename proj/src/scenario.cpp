#include "tomsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "tomsim/errors.hpp"

namespace tomsim {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

bool blank_or_comment(const std::string& line) {
    for (char ch : line) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch == '#';
    }
    return true;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    return lines;
}

std::vector<std::string> tokenize(const std::string& line, std::size_t line_no) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const unsigned char ch = static_cast<unsigned char>(line[i]);
        if (std::isspace(ch)) {
            ++i;
            continue;
        }
        if (ch == '"') {
            const std::size_t close = line.find('"', i + 1);
            if (close == std::string::npos) throw ParseError(line_no, "unterminated quote");
            out.push_back(line.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
            out.push_back(line.substr(i, j - i));
            i = j;
        }
    }
    return out;
}

double parse_num(const std::string& tok, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(line_no, "expected a number, got '" + tok + "'");
    }
}

std::uint64_t parse_u64(const std::string& tok, std::size_t line_no) {
    if (tok.empty() || tok[0] == '-' || tok[0] == '+')
        throw ParseError(line_no, "expected an unsigned integer, got '" + tok + "'");
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(tok, &pos, 10);
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError(line_no, "expected an unsigned integer, got '" + tok + "'");
    }
}

void expect_tokens(const std::vector<std::string>& toks, std::size_t n, std::size_t line_no,
                   const std::string& shape) {
    if (toks.size() != n) throw ParseError(line_no, "expected '" + shape + "'");
}

struct Parser {
    std::vector<std::string> lines;
    ScenarioDoc doc;

    // map accumulators
    bool have_cell_size = false;
    bool have_origin = false;
    bool have_grid = false;
    double cell_size = 0.0;
    Vec2 origin{};
    std::vector<std::string> grid_rows;

    // agent block in progress
    bool in_agent = false;
    ScenarioAgent agent;
    bool agent_has_pose = false;
    bool agent_has_speed = false;
    bool agent_has_fov = false;

    std::set<std::string> config_seen;

    explicit Parser(const std::string& text) : lines(split_lines(text)) {}

    ScenarioDoc run() {
        int section = 0;  // 0 none, then [map] [objects] [agents] [events] [config]
        bool in_grid = false;

        for (std::size_t i = 0; i < lines.size(); ++i) {
            const std::size_t ln = i + 1;
            const std::string& line = lines[i];

            if (in_grid) {
                std::string trimmed = line;
                while (!trimmed.empty() &&
                       std::isspace(static_cast<unsigned char>(trimmed.back())))
                    trimmed.pop_back();
                if (trimmed == "end") {
                    if (grid_rows.empty()) throw ParseError(ln, "grid block is empty");
                    in_grid = false;
                    have_grid = true;
                    continue;
                }
                if (trimmed.empty()) throw ParseError(ln, "blank line inside grid block");
                for (char ch : trimmed) {
                    if (ch != '#' && ch != '.')
                        throw ParseError(ln, "grid rows may only contain '#' and '.'");
                }
                if (!grid_rows.empty() && trimmed.size() != grid_rows.front().size())
                    throw ParseError(ln, "grid rows must all have the same width");
                grid_rows.push_back(trimmed);
                continue;
            }

            if (blank_or_comment(line)) continue;
            const auto toks = tokenize(line, ln);

            if (toks.size() == 1 && toks[0].size() >= 2 && toks[0].front() == '[' &&
                toks[0].back() == ']') {
                if (in_agent) throw ParseError(ln, "agent block not closed before new section");
                const int next = section_index(toks[0]);
                if (next < 0) throw ParseError(ln, "unknown section " + toks[0]);
                if (next <= section)
                    throw ParseError(ln, "section " + toks[0] + " out of order");
                section = next;
                continue;
            }

            switch (section) {
                case 0:
                    throw ParseError(ln, "content before the first section");
                case 1:
                    in_grid = map_line(toks, ln);
                    break;
                case 2:
                    object_line(toks, ln);
                    break;
                case 3:
                    agent_line(toks, ln);
                    break;
                case 4:
                    event_line(toks, ln);
                    break;
                case 5:
                    config_line(toks, ln);
                    break;
                default:
                    throw ParseError(ln, "internal section state");
            }
        }

        if (in_grid) throw ParseError(lines.size(), "grid block not closed");
        if (in_agent) throw ParseError(lines.size(), "agent block not closed");
        if (!have_grid || !have_cell_size || !have_origin)
            throw ValidationError("scenario needs a [map] section with cell_size, origin and grid");

        doc.grid = GridMap::from_ascii(grid_rows, cell_size, origin);
        validate();
        return std::move(doc);
    }

    static int section_index(const std::string& name) {
        if (name == "[map]") return 1;
        if (name == "[objects]") return 2;
        if (name == "[agents]") return 3;
        if (name == "[events]") return 4;
        if (name == "[config]") return 5;
        return -1;
    }

    // Returns true when a grid block opens.
    bool map_line(const std::vector<std::string>& toks, std::size_t ln) {
        if (toks[0] == "cell_size") {
            expect_tokens(toks, 2, ln, "cell_size <meters>");
            if (have_cell_size) throw ParseError(ln, "duplicate cell_size");
            cell_size = parse_num(toks[1], ln);
            if (!(cell_size > 0.0)) throw ParseError(ln, "cell_size must be positive");
            have_cell_size = true;
            return false;
        }
        if (toks[0] == "origin") {
            expect_tokens(toks, 3, ln, "origin <x> <y>");
            if (have_origin) throw ParseError(ln, "duplicate origin");
            origin = {parse_num(toks[1], ln), parse_num(toks[2], ln)};
            have_origin = true;
            return false;
        }
        if (toks[0] == "grid") {
            expect_tokens(toks, 1, ln, "grid");
            if (have_grid) throw ParseError(ln, "duplicate grid block");
            return true;
        }
        throw ParseError(ln, "unknown map key '" + toks[0] + "'");
    }

    void object_line(const std::vector<std::string>& toks, std::size_t ln) {
        expect_tokens(toks, 5, ln, "<id> \"<class>\" <x> <y> <z>");
        ScenarioObject obj;
        obj.id = toks[0];
        if (obj.id.find('"') != std::string::npos)
            throw ParseError(ln, "object ids may not contain quotes");
        obj.cls = toks[1];
        obj.position = {parse_num(toks[2], ln), parse_num(toks[3], ln), parse_num(toks[4], ln)};
        for (const auto& other : doc.objects) {
            if (other.id == obj.id) throw ParseError(ln, "duplicate object id '" + obj.id + "'");
        }
        doc.objects.push_back(std::move(obj));
    }

    void agent_line(const std::vector<std::string>& toks, std::size_t ln) {
        if (!in_agent) {
            if (toks[0] != "agent") throw ParseError(ln, "expected 'agent <name>'");
            expect_tokens(toks, 2, ln, "agent <name>");
            for (const auto& other : doc.agents) {
                if (other.name == toks[1])
                    throw ParseError(ln, "duplicate agent name '" + toks[1] + "'");
            }
            agent = ScenarioAgent{};
            agent.name = toks[1];
            if (agent.name.find('"') != std::string::npos)
                throw ParseError(ln, "agent names may not contain quotes");
            agent_has_pose = agent_has_speed = agent_has_fov = false;
            in_agent = true;
            return;
        }
        if (toks[0] == "end") {
            expect_tokens(toks, 1, ln, "end");
            if (!agent_has_pose)
                throw ParseError(ln, "agent '" + agent.name + "' has no pose");
            doc.agents.push_back(std::move(agent));
            in_agent = false;
            return;
        }
        if (toks[0] == "pose") {
            expect_tokens(toks, 5, ln, "pose <x> <y> <z> <heading>");
            if (agent_has_pose) throw ParseError(ln, "duplicate pose");
            agent.start = make_pose(parse_num(toks[1], ln), parse_num(toks[2], ln),
                                    parse_num(toks[3], ln), parse_num(toks[4], ln));
            agent_has_pose = true;
            return;
        }
        if (toks[0] == "speed") {
            expect_tokens(toks, 2, ln, "speed <m_per_s>");
            if (agent_has_speed) throw ParseError(ln, "duplicate speed");
            agent.speed = parse_num(toks[1], ln);
            agent_has_speed = true;
            return;
        }
        if (toks[0] == "fov") {
            expect_tokens(toks, 3, ln, "fov <half_angle> <max_range>");
            if (agent_has_fov) throw ParseError(ln, "duplicate fov");
            agent.fov = FovParams{parse_num(toks[1], ln), parse_num(toks[2], ln)};
            agent_has_fov = true;
            return;
        }
        if (toks[0] == "goto") {
            expect_tokens(toks, 3, ln, "goto <x> <y>");
            ScriptStep step;
            step.kind = ScriptStep::Kind::Goto;
            step.target = {parse_num(toks[1], ln), parse_num(toks[2], ln)};
            agent.script.push_back(step);
            return;
        }
        if (toks[0] == "wait" || toks[0] == "absent") {
            expect_tokens(toks, 2, ln, toks[0] + " <seconds>");
            ScriptStep step;
            step.kind = toks[0] == "wait" ? ScriptStep::Kind::Wait : ScriptStep::Kind::Absent;
            step.duration = parse_num(toks[1], ln);
            agent.script.push_back(step);
            return;
        }
        if (toks[0] == "follow") {
            if (toks.size() != 2 && toks.size() != 3)
                throw ParseError(ln, "expected 'follow <agent> [trail>]'");
            ScriptStep step;
            step.kind = ScriptStep::Kind::Follow;
            step.follow_name = toks[1];
            if (toks.size() == 3) step.trail_distance = parse_num(toks[2], ln);
            agent.script.push_back(step);
            return;
        }
        throw ParseError(ln, "unknown agent key '" + toks[0] + "'");
    }

    void event_line(const std::vector<std::string>& toks, std::size_t ln) {
        EventDecl decl;
        if (toks[0] == "relocate") {
            expect_tokens(toks, 6, ln, "relocate <t> <id> <x> <y> <z>");
            decl.kind = EventDecl::Kind::Relocate;
            decl.at = parse_num(toks[1], ln);
            decl.target = toks[2];
            decl.position = {parse_num(toks[3], ln), parse_num(toks[4], ln),
                             parse_num(toks[5], ln)};
        } else if (toks[0] == "set_present") {
            expect_tokens(toks, 4, ln, "set_present <t> <agent> on|off");
            decl.kind = EventDecl::Kind::SetPresent;
            decl.at = parse_num(toks[1], ln);
            decl.target = toks[2];
            if (toks[3] == "on")
                decl.present = true;
            else if (toks[3] == "off")
                decl.present = false;
            else
                throw ParseError(ln, "set_present takes 'on' or 'off'");
        } else if (toks[0] == "waypoint") {
            expect_tokens(toks, 5, ln, "waypoint <t> <agent> <x> <y>");
            decl.kind = EventDecl::Kind::Waypoint;
            decl.at = parse_num(toks[1], ln);
            decl.target = toks[2];
            decl.waypoint = {parse_num(toks[3], ln), parse_num(toks[4], ln)};
        } else if (toks[0] == "shuffle") {
            expect_tokens(toks, 4, ln, "shuffle <t> <seed> <fraction>");
            decl.kind = EventDecl::Kind::Shuffle;
            decl.at = parse_num(toks[1], ln);
            decl.seed = parse_u64(toks[2], ln);
            decl.fraction = parse_num(toks[3], ln);
        } else {
            throw ParseError(ln, "unknown event '" + toks[0] + "'");
        }
        doc.events.push_back(std::move(decl));
    }

    void config_line(const std::vector<std::string>& toks, std::size_t ln) {
        const std::string& key = toks[0];
        if (key == "assist") {
            expect_tokens(toks, 3, ln, "assist <t> \"<activity>\"");
            AssistCheckpoint cp;
            cp.at = parse_num(toks[1], ln);
            cp.activity = toks[2];
            if (cp.activity.empty()) throw ParseError(ln, "assist activity is empty");
            doc.config.assists.push_back(std::move(cp));
            return;
        }
        if (!config_seen.insert(key).second)
            throw ParseError(ln, "duplicate config key '" + key + "'");
        if (key == "trajectory_inference" || key == "human_perception") {
            expect_tokens(toks, 2, ln, key + " <value>");
            if (key == "trajectory_inference") {
                if (toks[1] == "on")
                    doc.config.trajectory_inference = true;
                else if (toks[1] == "off")
                    doc.config.trajectory_inference = false;
                else
                    throw ParseError(ln, "trajectory_inference takes 'on' or 'off'");
            } else {
                if (toks[1] == "ground_truth")
                    doc.config.human_ground_truth = true;
                else if (toks[1] == "noisy")
                    doc.config.human_ground_truth = false;
                else
                    throw ParseError(ln, "human_perception takes 'ground_truth' or 'noisy'");
            }
            return;
        }
        expect_tokens(toks, 2, ln, key + " <value>");
        const double v = parse_num(toks[1], ln);
        if (key == "dt")
            doc.config.dt = v;
        else if (key == "duration")
            doc.config.duration = v;
        else if (key == "sigma_pos")
            doc.config.noise.sigma_pos = v;
        else if (key == "sigma_heading")
            doc.config.noise.sigma_heading = v;
        else if (key == "p_drop_object")
            doc.config.noise.p_drop_object = v;
        else if (key == "p_drop_person")
            doc.config.noise.p_drop_person = v;
        else if (key == "tau")
            doc.config.tau = v;
        else
            throw ParseError(ln, "unknown config key '" + key + "'");
    }

    void validate() const {
        const GridMap& grid = doc.grid;
        auto require_free = [&grid](double x, double y, const std::string& what) {
            GridCell cell;
            try {
                cell = grid.world_to_cell(x, y);
            } catch (const OutOfBoundsError&) {
                throw ValidationError(what + " lies outside the map");
            }
            if (grid.is_wall(cell)) throw ValidationError(what + " lies on a wall cell");
        };

        for (const auto& obj : doc.objects)
            require_free(obj.position.x, obj.position.y, "object '" + obj.id + "'");

        std::set<std::string> agent_names;
        for (const auto& a : doc.agents) agent_names.insert(a.name);

        for (const auto& a : doc.agents) {
            require_free(a.start.position.x, a.start.position.y, "agent '" + a.name + "'");
            if (!(a.speed > 0.0))
                throw ValidationError("agent '" + a.name + "' needs a positive speed");
            validate_fov(a.fov);
            for (const auto& step : a.script) {
                switch (step.kind) {
                    case ScriptStep::Kind::Goto:
                        require_free(step.target.x, step.target.y,
                                     "goto target of agent '" + a.name + "'");
                        break;
                    case ScriptStep::Kind::Wait:
                    case ScriptStep::Kind::Absent:
                        if (step.duration < 0.0)
                            throw ValidationError("agent '" + a.name +
                                                  "' has a negative wait or absence");
                        break;
                    case ScriptStep::Kind::Follow:
                        if (!agent_names.count(step.follow_name))
                            throw ValidationError("agent '" + a.name + "' follows unknown agent '" +
                                                  step.follow_name + "'");
                        if (!(step.trail_distance > 0.0))
                            throw ValidationError("agent '" + a.name +
                                                  "' needs a positive trail distance");
                        break;
                }
            }
        }

        for (const auto& e : doc.events) {
            if (e.at < 0.0) throw ValidationError("events cannot fire before t=0");
            switch (e.kind) {
                case EventDecl::Kind::Relocate: {
                    bool found = false;
                    for (const auto& obj : doc.objects) found = found || obj.id == e.target;
                    if (!found)
                        throw ValidationError("relocate targets unknown object '" + e.target + "'");
                    require_free(e.position.x, e.position.y,
                                 "relocation of object '" + e.target + "'");
                    break;
                }
                case EventDecl::Kind::SetPresent:
                    if (!agent_names.count(e.target))
                        throw ValidationError("set_present targets unknown agent '" + e.target +
                                              "'");
                    break;
                case EventDecl::Kind::Waypoint:
                    if (!agent_names.count(e.target))
                        throw ValidationError("waypoint targets unknown agent '" + e.target + "'");
                    require_free(e.waypoint.x, e.waypoint.y,
                                 "waypoint for agent '" + e.target + "'");
                    break;
                case EventDecl::Kind::Shuffle:
                    if (!(e.fraction >= 0.0 && e.fraction <= 1.0))
                        throw ValidationError("shuffle fraction must lie in [0, 1]");
                    break;
            }
        }

        const ScenarioConfig& cfg = doc.config;
        if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
        if (cfg.duration < 0.0) throw ValidationError("duration cannot be negative");
        if (cfg.noise.sigma_pos < 0.0 || cfg.noise.sigma_heading < 0.0)
            throw ValidationError("noise deviations cannot be negative");
        if (cfg.noise.p_drop_object < 0.0 || cfg.noise.p_drop_object > 1.0 ||
            cfg.noise.p_drop_person < 0.0 || cfg.noise.p_drop_person > 1.0)
            throw ValidationError("drop probabilities must lie in [0, 1]");
        if (!(cfg.tau > 0.0)) throw ValidationError("tau must be positive");
        for (const auto& cp : cfg.assists) {
            if (cp.at < 0.0) throw ValidationError("assist checkpoints cannot fire before t=0");
        }
    }
};

}  // namespace

ScenarioDoc parse_scenario(const std::string& text) { return Parser(text).run(); }

ScenarioDoc load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioDoc& doc) {
    std::ostringstream out;
    out << "[map]\n";
    out << "cell_size " << fmt(doc.grid.cell_size()) << "\n";
    out << "origin " << fmt(doc.grid.origin().x) << " " << fmt(doc.grid.origin().y) << "\n";
    out << "grid\n";
    for (const auto& row : doc.grid.to_ascii()) out << row << "\n";
    out << "end\n";

    out << "[objects]\n";
    for (const auto& obj : doc.objects) {
        out << obj.id << " \"" << obj.cls << "\" " << fmt(obj.position.x) << " "
            << fmt(obj.position.y) << " " << fmt(obj.position.z) << "\n";
    }

    out << "[agents]\n";
    for (const auto& a : doc.agents) {
        out << "agent " << a.name << "\n";
        out << "pose " << fmt(a.start.position.x) << " " << fmt(a.start.position.y) << " "
            << fmt(a.start.position.z) << " " << fmt(a.start.heading) << "\n";
        out << "speed " << fmt(a.speed) << "\n";
        out << "fov " << fmt(a.fov.half_angle) << " " << fmt(a.fov.max_range) << "\n";
        for (const auto& step : a.script) {
            switch (step.kind) {
                case ScriptStep::Kind::Goto:
                    out << "goto " << fmt(step.target.x) << " " << fmt(step.target.y) << "\n";
                    break;
                case ScriptStep::Kind::Wait:
                    out << "wait " << fmt(step.duration) << "\n";
                    break;
                case ScriptStep::Kind::Absent:
                    out << "absent " << fmt(step.duration) << "\n";
                    break;
                case ScriptStep::Kind::Follow:
                    out << "follow " << step.follow_name << " " << fmt(step.trail_distance)
                        << "\n";
                    break;
            }
        }
        out << "end\n";
    }

    out << "[events]\n";
    for (const auto& e : doc.events) {
        switch (e.kind) {
            case EventDecl::Kind::Relocate:
                out << "relocate " << fmt(e.at) << " " << e.target << " " << fmt(e.position.x)
                    << " " << fmt(e.position.y) << " " << fmt(e.position.z) << "\n";
                break;
            case EventDecl::Kind::SetPresent:
                out << "set_present " << fmt(e.at) << " " << e.target << " "
                    << (e.present ? "on" : "off") << "\n";
                break;
            case EventDecl::Kind::Waypoint:
                out << "waypoint " << fmt(e.at) << " " << e.target << " " << fmt(e.waypoint.x)
                    << " " << fmt(e.waypoint.y) << "\n";
                break;
            case EventDecl::Kind::Shuffle:
                out << "shuffle " << fmt(e.at) << " " << e.seed << " " << fmt(e.fraction) << "\n";
                break;
        }
    }

    out << "[config]\n";
    const ScenarioConfig& cfg = doc.config;
    out << "dt " << fmt(cfg.dt) << "\n";
    out << "duration " << fmt(cfg.duration) << "\n";
    out << "sigma_pos " << fmt(cfg.noise.sigma_pos) << "\n";
    out << "sigma_heading " << fmt(cfg.noise.sigma_heading) << "\n";
    out << "p_drop_object " << fmt(cfg.noise.p_drop_object) << "\n";
    out << "p_drop_person " << fmt(cfg.noise.p_drop_person) << "\n";
    out << "tau " << fmt(cfg.tau) << "\n";
    out << "trajectory_inference " << (cfg.trajectory_inference ? "on" : "off") << "\n";
    out << "human_perception " << (cfg.human_ground_truth ? "ground_truth" : "noisy") << "\n";
    for (const auto& cp : cfg.assists)
        out << "assist " << fmt(cp.at) << " \"" << cp.activity << "\"\n";
    return out.str();
}

const ScenarioAgent* find_agent(const ScenarioDoc& doc, const std::string& name) {
    for (const auto& a : doc.agents) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

WorldState build_world(const ScenarioDoc& doc) {
    std::vector<ObjectInstance> objects;
    objects.reserve(doc.objects.size());
    for (const auto& obj : doc.objects) objects.push_back({obj.id, obj.cls, obj.position});
    BeliefState truth = init_belief(std::move(objects));

    std::vector<AgentState> agents;
    agents.reserve(doc.agents.size());
    for (const auto& a : doc.agents) {
        AgentState st;
        st.name = a.name;
        st.pose = a.start;
        st.fov = a.fov;
        st.speed = a.speed;
        st.script = a.script;
        agents.push_back(std::move(st));
    }

    // Shuffles expand against the declared placement, so their relocations
    // depend only on the document and the shuffle's own seed.
    WorldState initial(doc.grid);
    initial.truth = truth;

    std::vector<TimelineEvent> events;
    for (const auto& decl : doc.events) {
        TimelineEvent ev;
        ev.at = decl.at;
        switch (decl.kind) {
            case EventDecl::Kind::Relocate:
                ev.kind = TimelineEvent::Kind::Relocate;
                ev.target = decl.target;
                ev.position = decl.position;
                events.push_back(std::move(ev));
                break;
            case EventDecl::Kind::SetPresent:
                ev.kind = TimelineEvent::Kind::SetPresent;
                ev.target = decl.target;
                ev.present = decl.present;
                events.push_back(std::move(ev));
                break;
            case EventDecl::Kind::Waypoint:
                ev.kind = TimelineEvent::Kind::WaypointInject;
                ev.target = decl.target;
                ev.position = {decl.waypoint.x, decl.waypoint.y, 0.0};
                events.push_back(std::move(ev));
                break;
            case EventDecl::Kind::Shuffle: {
                auto moved = shuffle_objects(initial, decl.seed, decl.fraction, decl.at);
                for (auto& m : moved) events.push_back(std::move(m));
                break;
            }
        }
    }

    return make_world(doc.grid, std::move(truth), std::move(agents), std::move(events), 0);
}

}  // namespace tomsim
