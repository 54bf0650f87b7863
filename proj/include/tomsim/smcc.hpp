#ifndef TOMSIM_SMCC_HPP
#define TOMSIM_SMCC_HPP

#include <cstddef>
#include <map>

#include "tomsim/belief.hpp"

namespace tomsim {

struct ClassCost {
    double cost = 0.0;        // meters
    std::size_t matched = 0;  // matched pairs in this class
};

// Disparity between two semantic maps: per class, the minimum total distance
// over one-to-one matchings of same-class positions, summed across classes.
// mean divides by the first map's object count, so a mean of 1.0 reads as one
// meter of disparity per object.
struct SmccReport {
    double total = 0.0;
    std::map<ObjectClass, ClassCost> per_class;
    std::size_t object_count = 0;
    double mean = 0.0;
};

struct SmccOptions {
    // Strict mode (default) requires each class to have the same number of
    // instances on both sides and throws CardinalityMismatchError otherwise.
    // With the flag set, unmatched instances each add unmatched_penalty meters.
    bool allow_cardinality_mismatch = false;
    double unmatched_penalty = 5.0;
};

SmccReport smcc(const BeliefState& a, const BeliefState& b, const SmccOptions& options = {});

// The three curves an episode tracks, all mean values.
struct MeritTriple {
    double inferred_vs_human = 0.0;
    double human_vs_true = 0.0;
    double robot_vs_true = 0.0;
};

MeritTriple figures_of_merit(const BeliefState& inferred, const BeliefState& human,
                             const BeliefState& robot, const BeliefState& truth);

}  // namespace tomsim

#endif
