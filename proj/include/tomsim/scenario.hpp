#ifndef TOMSIM_SCENARIO_HPP
#define TOMSIM_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tomsim/belief.hpp"
#include "tomsim/geometry.hpp"
#include "tomsim/world.hpp"

namespace tomsim {

// One declared entry in the [events] section.  Shuffle entries are kept
// verbatim so a document round-trips; they expand into relocations only
// when a world is built from the document.
struct EventDecl {
    enum class Kind { Relocate, SetPresent, Waypoint, Shuffle };
    Kind kind = Kind::Relocate;
    double at = 0.0;
    std::string target;        // object id or agent name
    Vec3 position{};           // Relocate
    Vec2 waypoint{};           // Waypoint
    bool present = true;       // SetPresent
    std::uint64_t seed = 0;    // Shuffle
    double fraction = 0.0;     // Shuffle
};

struct AssistCheckpoint {
    double at = 0.0;
    std::string activity;
};

struct ScenarioConfig {
    double dt = 0.5;
    double duration = 60.0;
    PerceptionNoise noise{};
    double tau = 0.5;
    bool trajectory_inference = true;
    bool human_ground_truth = true;
    std::vector<AssistCheckpoint> assists;
};

struct ScenarioObject {
    std::string id;
    ObjectClass cls;
    Vec3 position{};
};

struct ScenarioAgent {
    std::string name;
    Pose start{};
    double speed = 1.0;
    FovParams fov{};
    std::vector<ScriptStep> script;
};

struct ScenarioDoc {
    GridMap grid{1, 1, 1.0, {0.0, 0.0}};
    std::vector<ScenarioObject> objects;
    std::vector<ScenarioAgent> agents;
    std::vector<EventDecl> events;
    ScenarioConfig config;
};

// Parses the text form.  Throws ParseError (with a line number) on
// malformed input and ValidationError when the document is well formed
// but inconsistent (an object on a wall, an event naming a missing id).
ScenarioDoc parse_scenario(const std::string& text);
ScenarioDoc load_scenario(const std::string& path);

// Canonical text form: fixed section order, fixed key order, %.6f
// numbers.  serialize(parse(serialize(doc))) == serialize(doc).
std::string serialize_scenario(const ScenarioDoc& doc);

const ScenarioAgent* find_agent(const ScenarioDoc& doc, const std::string& name);

// Instantiates the simulation state.  Shuffle declarations are expanded
// against the document's initial object placement, each with its own
// seed, independent of any episode seed.
WorldState build_world(const ScenarioDoc& doc);

}  // namespace tomsim

#endif
