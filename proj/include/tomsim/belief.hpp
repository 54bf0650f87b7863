#ifndef TOMSIM_BELIEF_HPP
#define TOMSIM_BELIEF_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tomsim/geometry.hpp"

namespace tomsim {

// Case-sensitive semantic label; "blue cup" and "cup" are distinct classes.
using ObjectClass = std::string;

struct ObjectInstance {
    std::string id;  // stable unique identifier, no whitespace or quotes
    ObjectClass cls;
    Vec3 position;  // meters, world frame

    friend bool operator==(const ObjectInstance& a, const ObjectInstance& b) {
        return a.id == b.id && a.cls == b.cls && a.position == b.position;
    }
    friend bool operator!=(const ObjectInstance& a, const ObjectInstance& b) {
        return !(a == b);
    }
};

struct Detection {
    ObjectClass cls;
    Vec3 position;
};

struct ObservationBatch {
    std::vector<Detection> detections;
    double timestamp = 0.0;  // seconds
};

struct AssignmentPair {
    std::size_t detection_index;  // index into the batch
    std::string instance_id;
    double distance;
};

// One resolved class within a batch: which detection landed on which instance.
struct AssignmentRecord {
    ObjectClass cls;
    std::vector<AssignmentPair> pairs;  // in detection order
    double total_cost = 0.0;
};

struct ResolveResult;

// A semantic map: object instances at believed positions. Value type; all
// updates return a new state and leave the input untouched. The instance
// sequence keeps insertion order, which serialization and per-class column
// order both follow.
class BeliefState {
public:
    BeliefState() = default;

    const std::vector<ObjectInstance>& instances() const { return instances_; }
    std::uint64_t revision() const { return revision_; }
    std::size_t size() const { return instances_.size(); }

    const ObjectInstance* find(const std::string& id) const;

    // Storage indices of the instances of one class, ascending.
    std::vector<std::size_t> class_indices(const ObjectClass& cls) const;

    // Sorted unique class labels.
    std::vector<ObjectClass> classes() const;

    // Instances equal, revision ignored.
    bool contents_equal(const BeliefState& other) const {
        return instances_ == other.instances_;
    }

    friend bool operator==(const BeliefState& a, const BeliefState& b) {
        return a.revision_ == b.revision_ && a.instances_ == b.instances_;
    }
    friend bool operator!=(const BeliefState& a, const BeliefState& b) { return !(a == b); }

    // New state with one instance's position replaced; the relocation primitive
    // for ground-truth maps. Revision increments. Throws UnknownIdError.
    BeliefState with_position(const std::string& id, const Vec3& position) const;

    // For deserialization: rebuild a state with an explicit revision counter.
    static BeliefState restore(std::vector<ObjectInstance> instances,
                               std::uint64_t revision);

private:
    friend BeliefState init_belief(std::vector<ObjectInstance> objects);
    friend ResolveResult resolve_update(const BeliefState& belief,
                                        const ObservationBatch& batch);
    friend BeliefState add_object(const BeliefState& belief, const ObjectInstance& object);
    friend BeliefState remove_object(const BeliefState& belief, const std::string& id);

    std::vector<ObjectInstance> instances_;
    std::uint64_t revision_ = 0;
};

// Builds a revision-0 state. Throws DuplicateIdError on repeated ids.
BeliefState init_belief(std::vector<ObjectInstance> objects);

struct ResolveResult {
    BeliefState state;
    std::vector<AssignmentRecord> records;  // one per class, sorted by class label
};

// Folds one observation batch into the state. Detections are grouped by class;
// within each class they are assigned to believed instances by minimum total
// 3D distance, and each assigned instance takes its detection's position
// outright. Unassigned instances keep their positions; ids and classes never
// change. Revision increments exactly once, even for an empty batch.
//
// Throws UnknownClassError when a detection's class has no believed instance,
// OverfullError when a class has more detections than instances.
ResolveResult resolve_update(const BeliefState& belief, const ObservationBatch& batch);

// Throws DuplicateIdError.
BeliefState add_object(const BeliefState& belief, const ObjectInstance& object);

// Throws UnknownIdError.
BeliefState remove_object(const BeliefState& belief, const std::string& id);

// The subset of `objects` the observer can currently see: inside the view cone
// and with a wall-free line of sight. Input order is preserved.
std::vector<ObjectInstance> visible_objects(const GridMap& grid, const Pose& observer,
                                            const FovParams& fov,
                                            const std::vector<ObjectInstance>& objects);

// Text form: a `revision` line, a `timestamp` line, then one instance per line
// as `id "class" x y z` with positions fixed to 6 decimals. Serializing, parsing
// and serializing again yields byte-identical text.
std::string serialize_belief(const BeliefState& belief, double timestamp);

struct ParsedBelief {
    BeliefState state;
    double timestamp = 0.0;
};

// Throws ParseError with a 1-based line number on malformed input.
ParsedBelief parse_belief(const std::string& text);

}  // namespace tomsim

#endif
