#ifndef TOMSIM_TOM_HPP
#define TOMSIM_TOM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tomsim/belief.hpp"
#include "tomsim/geometry.hpp"

namespace tomsim {

// One line of the engine's audit log. Entries with subject "robot" or
// "inferred" record exactly one revision of that belief; subject "note" marks
// events that changed nothing (an unreachable sighting, for instance).
struct HistoryEntry {
    double t = 0.0;
    std::string subject;
    std::uint64_t revision = 0;  // the belief's revision after the update
    std::string note;
};

// The robot's own map plus its running estimate of what the co-located person
// believes. Both start from the same initial map; the estimate is only ever
// fed from robot_belief, never from ground truth.
struct TomState {
    BeliefState robot_belief;
    BeliefState inferred;  // estimated person belief
    std::optional<Pose> last_seen_pose;
    double last_seen_time = 0.0;
    std::vector<HistoryEntry> history;
};

TomState make_tom(const BeliefState& initial);

// Folds the robot's own detections into robot_belief.
TomState update_robot_belief(const TomState& tom, const ObservationBatch& batch);

// What someone standing at `viewpoint` would see if the world matched
// `belief`: the believed positions filtered through the view cone and
// line-of-sight, packaged as detections at those believed positions.
ObservationBatch infer_visible_from_belief(const BeliefState& belief, const Pose& viewpoint,
                                           const FovParams& fov, const GridMap& grid,
                                           double timestamp);

struct TraversalSummary {
    std::vector<GridCell> cells;               // inferred route, empty if none
    std::vector<std::size_t> transfers_per_cell;  // detections filtered in per cell
    bool path_found = true;
};

struct SightingResult {
    TomState state;
    TraversalSummary traversal;
};

// Processes a confirmed sighting of the person at time t. When a previous
// sighting exists in a different cell and trajectory inference is on, the
// person is assumed to have walked the A* route between the two cells: at each
// route cell a synthetic pose (cell center, facing the next cell; the last
// cell faces the sighted heading) is viewed through the person's field of
// view against robot_belief and resolved into the estimate. One further
// update always runs at the exact sighted pose. An unreachable route falls
// back to the exact-pose update alone and is logged.
SightingResult on_person_sighting(const TomState& tom, const Pose& sighting, double t,
                                  const GridMap& grid, const FovParams& person_fov,
                                  bool infer_trajectory = true);

// One engine tick: the robot's own map updates first, then the sighting (if
// any) updates the estimate, so inference always reads this frame's map. The
// sighting time is the batch timestamp.
TomState full_step(const TomState& tom, const ObservationBatch& robot_obs,
                   const std::optional<Pose>& person_pose, const GridMap& grid,
                   const FovParams& person_fov, bool infer_trajectory = true);

}  // namespace tomsim

#endif
