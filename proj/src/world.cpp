#include "tomsim/world.hpp"

#include <algorithm>
#include <cmath>

#include "tomsim/errors.hpp"

namespace tomsim {

AgentState* WorldState::agent(const std::string& name) {
    for (AgentState& a : agents)
        if (a.name == name) return &a;
    return nullptr;
}

const AgentState* WorldState::agent(const std::string& name) const {
    for (const AgentState& a : agents)
        if (a.name == name) return &a;
    return nullptr;
}

WorldState make_world(GridMap grid, BeliefState truth, std::vector<AgentState> agents,
                      std::vector<TimelineEvent> events, std::uint64_t rng_seed) {
    WorldState world(std::move(grid));
    world.truth = std::move(truth);
    world.agents = std::move(agents);
    world.rng_seed = rng_seed;
    std::stable_sort(events.begin(), events.end(),
                     [](const TimelineEvent& a, const TimelineEvent& b) { return a.at < b.at; });
    world.events = std::move(events);
    return world;
}

namespace {

void require_free(const GridMap& grid, const Vec3& p, const std::string& what) {
    const GridCell cell = grid.world_to_cell(p);
    if (grid.is_wall(cell))
        throw EventTargetsWallError(what + " targets wall cell (" + std::to_string(cell.x) +
                                    ", " + std::to_string(cell.y) + ")");
}

void apply_event(WorldState& world, const TimelineEvent& event) {
    switch (event.kind) {
        case TimelineEvent::Kind::Relocate: {
            require_free(world.grid, event.position, "relocation of \"" + event.target + "\"");
            world.truth = world.truth.with_position(event.target, event.position);
            break;
        }
        case TimelineEvent::Kind::SetPresent: {
            AgentState* agent = world.agent(event.target);
            if (agent == nullptr)
                throw UnknownIdError("event references unknown agent \"" + event.target + "\"");
            agent->present = event.present;
            break;
        }
        case TimelineEvent::Kind::WaypointInject: {
            AgentState* agent = world.agent(event.target);
            if (agent == nullptr)
                throw UnknownIdError("event references unknown agent \"" + event.target + "\"");
            require_free(world.grid, event.position, "waypoint for \"" + event.target + "\"");
            ScriptStep diversion;
            diversion.kind = ScriptStep::Kind::Goto;
            diversion.target = {event.position.x, event.position.y};
            agent->script.insert(agent->script.begin() +
                                     static_cast<std::ptrdiff_t>(agent->cursor),
                                 diversion);
            agent->route_ready = false;  // current route, if any, is superseded
            break;
        }
    }
}

// Polyline toward `target`: centers of the A* route's interior cells, then the
// exact target point inside the final cell.
std::vector<Vec2> plan_route(const GridMap& grid, const Vec3& from, const Vec2& target) {
    const GridCell start = grid.world_to_cell(from);
    const GridCell goal = grid.world_to_cell(target.x, target.y);
    const GridPath path = astar(grid, start, goal);
    std::vector<Vec2> route;
    for (std::size_t i = 1; i + 1 < path.cells.size(); ++i)
        route.push_back(grid.cell_center(path.cells[i]));
    route.push_back(target);
    return route;
}

void face_direction(AgentState& agent, double dx, double dy) {
    if (dx != 0.0 || dy != 0.0) agent.pose.heading = normalize_angle(std::atan2(dy, dx));
}

// Moves along agent.route by up to `budget` meters; returns meters actually
// moved. If stop_near is set, movement halts as soon as the planar distance to
// that point would drop to stop_distance.
double advance_route(AgentState& agent, double budget, const Vec2* stop_near,
                     double stop_distance) {
    double moved = 0.0;
    while (budget > 0.0 && agent.route_leg < agent.route.size()) {
        const Vec2 to = agent.route[agent.route_leg];
        const double dx = to.x - agent.pose.position.x;
        const double dy = to.y - agent.pose.position.y;
        const double seg = std::hypot(dx, dy);
        if (seg == 0.0) {
            ++agent.route_leg;
            continue;
        }
        double limit = std::min(budget, seg);
        bool blocked = false;
        if (stop_near != nullptr) {
            // Earliest point along the segment at stop_distance from the mark.
            const double ux = dx / seg, uy = dy / seg;
            const double px = stop_near->x - agent.pose.position.x;
            const double py = stop_near->y - agent.pose.position.y;
            const double along = px * ux + py * uy;
            const double closest2 = px * px + py * py - along * along;
            const double r2 = stop_distance * stop_distance;
            if (closest2 <= r2) {
                const double reach = along - std::sqrt(r2 - closest2);
                if (reach <= 0.0) break;
                if (reach < limit) {
                    limit = reach;
                    blocked = true;
                }
            }
        }
        face_direction(agent, dx, dy);
        if (limit >= seg) {
            agent.pose.position.x = to.x;  // snap, so no drift accumulates
            agent.pose.position.y = to.y;
            ++agent.route_leg;
        } else {
            agent.pose.position.x += dx / seg * limit;
            agent.pose.position.y += dy / seg * limit;
        }
        moved += limit;
        budget -= limit;
        if (blocked) break;
    }
    return moved;
}

void advance_agent(WorldState& world, AgentState& agent, double dt) {
    double t_left = dt;
    while (t_left > 0.0 && agent.cursor < agent.script.size()) {
        ScriptStep& directive = agent.script[agent.cursor];
        switch (directive.kind) {
            case ScriptStep::Kind::Wait:
            case ScriptStep::Kind::Absent: {
                if (directive.kind == ScriptStep::Kind::Absent) agent.present = false;
                const double remaining = directive.duration - agent.directive_elapsed;
                const double used = std::min(remaining, t_left);
                agent.directive_elapsed += used;
                t_left -= used;
                if (agent.directive_elapsed >= directive.duration) {
                    if (directive.kind == ScriptStep::Kind::Absent) agent.present = true;
                    agent.directive_elapsed = 0.0;
                    ++agent.cursor;
                }
                break;
            }
            case ScriptStep::Kind::Goto: {
                if (!agent.present) return;  // removed by an event mid-walk
                if (!agent.route_ready) {
                    agent.route = plan_route(world.grid, agent.pose.position, directive.target);
                    agent.route_leg = 0;
                    agent.route_ready = true;
                }
                const double moved = advance_route(agent, agent.speed * t_left, nullptr, 0.0);
                t_left -= moved / agent.speed;
                if (agent.route_leg >= agent.route.size()) {
                    agent.route_ready = false;
                    ++agent.cursor;
                } else {
                    t_left = 0.0;  // budget exhausted mid-route
                }
                break;
            }
            case ScriptStep::Kind::Follow: {
                if (!agent.present) return;
                const AgentState* mark = world.agent(directive.follow_name);
                if (mark == nullptr || !mark->present ||
                    planar_distance(agent.pose.position, mark->pose.position) <=
                        directive.trail_distance) {
                    return;  // hold position this tick
                }
                agent.route = plan_route(world.grid, agent.pose.position,
                                         {mark->pose.position.x, mark->pose.position.y});
                agent.route_leg = 0;
                agent.route_ready = false;  // replanned every tick
                const Vec2 mark_pos{mark->pose.position.x, mark->pose.position.y};
                advance_route(agent, agent.speed * t_left, &mark_pos,
                              directive.trail_distance);
                return;  // following consumes the whole tick
            }
        }
    }
}

}  // namespace

WorldState step(const WorldState& world, double dt) {
    WorldState next = world;
    const double target_clock = next.clock + dt;
    while (next.applied_events < next.events.size() &&
           next.events[next.applied_events].at <= target_clock) {
        apply_event(next, next.events[next.applied_events]);
        ++next.applied_events;
    }
    for (AgentState& agent : next.agents) advance_agent(next, agent, dt);
    next.clock = target_clock;
    next.frame += 1;
    return next;
}

ObservationBatch sense_objects(const WorldState& world, const AgentState& observer,
                               const PerceptionNoise& noise, Rng& rng) {
    ObservationBatch batch;
    batch.timestamp = world.clock;
    for (const ObjectInstance& obj :
         visible_objects(world.grid, observer.pose, observer.fov, world.truth.instances())) {
        if (rng.uniform() < noise.p_drop_object) continue;
        Detection det{obj.cls, obj.position};
        det.position.x += noise.sigma_pos * rng.gauss();
        det.position.y += noise.sigma_pos * rng.gauss();
        batch.detections.push_back(std::move(det));
    }
    return batch;
}

std::optional<Pose> sense_person(const WorldState& world, const AgentState& robot,
                                 const PerceptionNoise& noise, Rng& rng) {
    const AgentState* person = world.agent("human");
    if (person == nullptr || !person->present) return std::nullopt;
    if (!in_fov(robot.pose, robot.fov, person->pose.position)) return std::nullopt;
    if (!line_of_sight(world.grid, robot.pose.position, person->pose.position))
        return std::nullopt;
    if (rng.uniform() < noise.p_drop_person) return std::nullopt;
    Pose seen = person->pose;
    seen.heading = normalize_angle(seen.heading + noise.sigma_heading * rng.gauss());
    return seen;
}

std::vector<TimelineEvent> shuffle_objects(const WorldState& world, std::uint64_t seed,
                                           double fraction, double at) {
    const std::vector<ObjectInstance>& objects = world.truth.instances();
    const std::size_t count =
        static_cast<std::size_t>(fraction * static_cast<double>(objects.size()));
    Rng rng(seed);

    // Partial Fisher-Yates: the first `count` slots end up a uniform
    // without-replacement sample.
    std::vector<std::size_t> order(objects.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
        std::swap(order[i], order[j]);
    }

    const std::vector<GridCell> free = world.grid.free_cells_row_major();
    std::vector<TimelineEvent> events;
    events.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const ObjectInstance& obj = objects[order[i]];
        const GridCell cell = free[static_cast<std::size_t>(rng.below(free.size()))];
        const Vec2 center = world.grid.cell_center(cell);
        TimelineEvent event;
        event.at = at;
        event.kind = TimelineEvent::Kind::Relocate;
        event.target = obj.id;
        event.position = {center.x, center.y, obj.position.z};
        events.push_back(std::move(event));
    }
    return events;
}

}  // namespace tomsim
