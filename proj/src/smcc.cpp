#include "tomsim/smcc.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "tomsim/assignment.hpp"
#include "tomsim/errors.hpp"

namespace tomsim {

SmccReport smcc(const BeliefState& a, const BeliefState& b, const SmccOptions& options) {
    std::set<ObjectClass> labels;
    for (const ObjectInstance& obj : a.instances()) labels.insert(obj.cls);
    for (const ObjectInstance& obj : b.instances()) labels.insert(obj.cls);

    SmccReport report;
    report.object_count = a.size();

    for (const ObjectClass& cls : labels) {
        std::vector<Vec3> pa, pb;
        for (std::size_t i : a.class_indices(cls)) pa.push_back(a.instances()[i].position);
        for (std::size_t i : b.class_indices(cls)) pb.push_back(b.instances()[i].position);

        if (!options.allow_cardinality_mismatch && pa.size() != pb.size())
            throw CardinalityMismatchError("class \"" + cls + "\" has " +
                                           std::to_string(pa.size()) + " vs " +
                                           std::to_string(pb.size()) + " instances");

        // Rows are the smaller side so the rectangular solve stays valid.
        const std::vector<Vec3>& rows = pa.size() <= pb.size() ? pa : pb;
        const std::vector<Vec3>& cols = pa.size() <= pb.size() ? pb : pa;
        ClassCost entry;
        entry.matched = rows.size();
        if (!rows.empty()) {
            CostMatrix cost(rows.size(), cols.size());
            for (std::size_t r = 0; r < rows.size(); ++r)
                for (std::size_t c = 0; c < cols.size(); ++c)
                    cost.at(r, c) = distance3(rows[r], cols[c]);
            entry.cost = min_cost_assignment(cost).total_cost;
        }
        entry.cost += options.unmatched_penalty *
                      static_cast<double>(cols.size() - rows.size());
        report.total += entry.cost;
        report.per_class.emplace(cls, entry);
    }

    report.mean = report.object_count == 0
                      ? 0.0
                      : report.total / static_cast<double>(report.object_count);
    return report;
}

MeritTriple figures_of_merit(const BeliefState& inferred, const BeliefState& human,
                             const BeliefState& robot, const BeliefState& truth) {
    MeritTriple triple;
    triple.inferred_vs_human = smcc(inferred, human).mean;
    triple.human_vs_true = smcc(human, truth).mean;
    triple.robot_vs_true = smcc(robot, truth).mean;
    return triple;
}

}  // namespace tomsim
