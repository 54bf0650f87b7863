#ifndef TOMSIM_ASSIST_HPP
#define TOMSIM_ASSIST_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tomsim/belief.hpp"

namespace tomsim {

// Which object classes matter for which activity. Lives in a data file, one
// line per activity: `activity name: class, class, ...`.
struct RelevanceMap {
    std::map<std::string, std::set<ObjectClass>> activities;

    static RelevanceMap load(std::istream& in);
    static RelevanceMap load_file(const std::string& path);
};

// Objects the robot believes the person has lost track of.
struct UnawareSet {
    std::vector<ObjectInstance> objects;  // sorted by id
    double tau = 0.5;
};

// The unaware objects that matter for one activity.
struct NotifySet {
    std::string activity;
    std::vector<ObjectInstance> objects;  // sorted by id
};

// An object is unaware-worthy when every same-class instance in the estimated
// person belief sits farther than tau meters from it; a class absent from the
// estimate leaves all its robot-side instances unaware. tau must be positive.
UnawareSet unaware_objects(const BeliefState& robot, const BeliefState& inferred, double tau);

// Filters an unaware set down to the classes relevant to `activity`.
// Throws UnknownActivityError for activities the map does not list.
NotifySet relevant_subset(const UnawareSet& unaware, const std::string& activity,
                          const RelevanceMap& relevance);

struct NotifyScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Set overlap on instance ids. Empty-over-empty ratios score 1.0; an f1 whose
// denominator vanishes scores 0.0.
NotifyScore score_notifications(const NotifySet& predicted,
                                const std::vector<ObjectInstance>& truth);

// Optional out-of-process relevance picker. Speaks a two-line request
// (activity, then tab-separated candidate classes) on the child's stdin and
// expects one line of tab-separated selected classes back. Any failure --
// spawn error, timeout, reply naming a non-candidate class -- yields nullopt
// so the caller can fall back to the rule-based map.
class ExternalReasoner {
public:
    ExternalReasoner(std::string shell_command, int timeout_ms)
        : command_(std::move(shell_command)), timeout_ms_(timeout_ms) {}

    std::optional<std::vector<ObjectClass>> query(const std::string& activity,
                                                  const std::vector<ObjectClass>& candidates) const;

private:
    std::string command_;
    int timeout_ms_;
};

// relevant_subset with an optional external reasoner in front: when the
// reasoner answers validly its class picks are used, otherwise the rule-based
// map decides (the fallback is logged to stderr).
NotifySet select_relevant(const UnawareSet& unaware, const std::string& activity,
                          const RelevanceMap& relevance, const ExternalReasoner* reasoner);

}  // namespace tomsim

#endif
