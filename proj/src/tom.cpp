#include "tomsim/tom.hpp"

#include <cmath>
#include <string>

#include "tomsim/errors.hpp"

namespace tomsim {

TomState make_tom(const BeliefState& initial) {
    TomState tom;
    tom.robot_belief = initial;
    tom.inferred = initial;
    return tom;
}

TomState update_robot_belief(const TomState& tom, const ObservationBatch& batch) {
    TomState next = tom;
    next.robot_belief = resolve_update(tom.robot_belief, batch).state;
    next.history.push_back({batch.timestamp, "robot", next.robot_belief.revision(),
                            std::to_string(batch.detections.size()) + " detections"});
    return next;
}

ObservationBatch infer_visible_from_belief(const BeliefState& belief, const Pose& viewpoint,
                                           const FovParams& fov, const GridMap& grid,
                                           double timestamp) {
    ObservationBatch batch;
    batch.timestamp = timestamp;
    for (const ObjectInstance& obj : visible_objects(grid, viewpoint, fov, belief.instances()))
        batch.detections.push_back({obj.cls, obj.position});
    return batch;
}

namespace {

std::string cell_text(GridCell c) {
    return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

void apply_inferred_view(TomState& tom, const Pose& viewpoint, const GridMap& grid,
                         const FovParams& person_fov, double t, const std::string& where,
                         std::size_t* transfer_count) {
    const ObservationBatch batch =
        infer_visible_from_belief(tom.robot_belief, viewpoint, person_fov, grid, t);
    tom.inferred = resolve_update(tom.inferred, batch).state;
    tom.history.push_back({t, "inferred", tom.inferred.revision(),
                           where + ": " + std::to_string(batch.detections.size()) +
                               " objects in view"});
    if (transfer_count != nullptr) *transfer_count = batch.detections.size();
}

}  // namespace

SightingResult on_person_sighting(const TomState& tom, const Pose& sighting, double t,
                                  const GridMap& grid, const FovParams& person_fov,
                                  bool infer_trajectory) {
    SightingResult result;
    result.state = tom;
    TomState& next = result.state;

    if (tom.last_seen_pose.has_value() && infer_trajectory) {
        const GridCell from = grid.world_to_cell(tom.last_seen_pose->position);
        const GridCell to = grid.world_to_cell(sighting.position);
        if (from != to) {
            try {
                const GridPath path = astar(grid, from, to);
                result.traversal.cells = path.cells;
                for (std::size_t i = 0; i < path.cells.size(); ++i) {
                    const Vec2 center = grid.cell_center(path.cells[i]);
                    Pose synthetic;
                    synthetic.position = {center.x, center.y, sighting.position.z};
                    if (i + 1 < path.cells.size()) {
                        const Vec2 ahead = grid.cell_center(path.cells[i + 1]);
                        synthetic.heading =
                            normalize_angle(std::atan2(ahead.y - center.y, ahead.x - center.x));
                    } else {
                        synthetic.heading = sighting.heading;
                    }
                    std::size_t transfers = 0;
                    apply_inferred_view(next, synthetic, grid, person_fov, t,
                                        "traversal cell " + cell_text(path.cells[i]),
                                        &transfers);
                    result.traversal.transfers_per_cell.push_back(transfers);
                }
            } catch (const NoPathError&) {
                result.traversal.path_found = false;
                next.history.push_back(
                    {t, "note", 0,
                     "no route from " + cell_text(from) + " to " + cell_text(to) +
                         "; traversal skipped"});
            }
        }
    }

    apply_inferred_view(next, sighting, grid, person_fov, t, "sighted pose", nullptr);
    next.last_seen_pose = sighting;
    next.last_seen_time = t;
    return result;
}

TomState full_step(const TomState& tom, const ObservationBatch& robot_obs,
                   const std::optional<Pose>& person_pose, const GridMap& grid,
                   const FovParams& person_fov, bool infer_trajectory) {
    TomState next = update_robot_belief(tom, robot_obs);
    if (person_pose.has_value())
        next = on_person_sighting(next, *person_pose, robot_obs.timestamp, grid, person_fov,
                                  infer_trajectory)
                   .state;
    return next;
}

}  // namespace tomsim
