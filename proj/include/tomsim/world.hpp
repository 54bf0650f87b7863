#ifndef TOMSIM_WORLD_HPP
#define TOMSIM_WORLD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tomsim/belief.hpp"
#include "tomsim/geometry.hpp"
#include "tomsim/rng.hpp"

namespace tomsim {

struct PerceptionNoise {
    double sigma_pos = 0.0;      // meters, per horizontal axis
    double sigma_heading = 0.0;  // radians
    double p_drop_object = 0.0;
    double p_drop_person = 0.0;
};

// One entry of an agent's script. Goto walks to a world point along an A*
// route; Wait stands still; Absent removes the agent from the world for a
// while (position retained); Follow trails another agent indefinitely,
// keeping trail_distance of separation.
struct ScriptStep {
    enum class Kind { Goto, Wait, Absent, Follow };
    Kind kind = Kind::Wait;
    Vec2 target{};
    double duration = 0.0;
    std::string follow_name;
    double trail_distance = 1.5;
};

struct AgentState {
    std::string name;  // "human" and "robot" in shipped scenarios
    Pose pose;
    FovParams fov;
    double speed = 1.0;  // m/s
    std::vector<ScriptStep> script;
    std::size_t cursor = 0;
    bool present = true;

    // Motion bookkeeping for the step in progress.
    double directive_elapsed = 0.0;  // seconds spent in the current Wait/Absent
    std::vector<Vec2> route;         // remaining polyline of the current Goto
    std::size_t route_leg = 0;
    bool route_ready = false;
};

struct TimelineEvent {
    enum class Kind { Relocate, SetPresent, WaypointInject };
    double at = 0.0;  // seconds
    Kind kind = Kind::Relocate;
    std::string target;  // object id (Relocate) or agent name
    Vec3 position{};     // Relocate target, or WaypointInject point (z unused)
    bool present = true; // SetPresent value
};

// The simulated world. Value type: step() returns the advanced copy, so a
// caller can keep any frame it likes.
struct WorldState {
    GridMap grid;
    BeliefState truth;
    std::vector<AgentState> agents;
    double clock = 0.0;
    std::uint64_t frame = 0;
    std::uint64_t rng_seed = 0;

    // Stably sorted by `at` at construction; applied_events advances past
    // everything that already fired.
    std::vector<TimelineEvent> events;
    std::size_t applied_events = 0;

    explicit WorldState(GridMap g) : grid(std::move(g)) {}

    AgentState* agent(const std::string& name);
    const AgentState* agent(const std::string& name) const;
};

// Assembles a world and stably sorts the timeline by timestamp, keeping
// declaration order among ties.
WorldState make_world(GridMap grid, BeliefState truth, std::vector<AgentState> agents,
                      std::vector<TimelineEvent> events, std::uint64_t rng_seed);

// Advances one tick: fires every event due by clock+dt (timestamp order,
// declaration order among ties), then moves each present agent through its
// script in declaration order, then bumps clock and frame. Agents moving along
// routes face their travel direction and keep the last travel heading when
// idle. Throws EventTargetsWallError when a relocation or injected waypoint
// lands on a wall.
WorldState step(const WorldState& world, double dt);

// Ground-truth visibility from `observer`, with each visible object
// independently dropped with p_drop_object and surviving detections perturbed
// by Gaussian(0, sigma_pos) on x and y (z exact). With all knobs zero the
// batch equals visible_objects exactly.
ObservationBatch sense_objects(const WorldState& world, const AgentState& observer,
                               const PerceptionNoise& noise, Rng& rng);

// The pose of the agent named "human" if it is present, inside the robot's
// view cone, unoccluded, and not dropped (p_drop_person). Heading carries
// Gaussian(0, sigma_heading) noise, renormalized; position is exact.
std::optional<Pose> sense_person(const WorldState& world, const AgentState& robot,
                                 const PerceptionNoise& noise, Rng& rng);

// Picks floor(fraction * object_count) distinct objects uniformly at random
// and builds one Relocate event per pick, each targeting a uniformly random
// free-cell center at the object's current height, all stamped with time `at`.
// Fully determined by (world contents, seed).
std::vector<TimelineEvent> shuffle_objects(const WorldState& world, std::uint64_t seed,
                                           double fraction, double at);

}  // namespace tomsim

#endif
