#include "tomsim/belief.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "tomsim/assignment.hpp"
#include "tomsim/errors.hpp"

namespace tomsim {

const ObjectInstance* BeliefState::find(const std::string& id) const {
    for (const ObjectInstance& obj : instances_)
        if (obj.id == id) return &obj;
    return nullptr;
}

std::vector<std::size_t> BeliefState::class_indices(const ObjectClass& cls) const {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < instances_.size(); ++i)
        if (instances_[i].cls == cls) indices.push_back(i);
    return indices;
}

std::vector<ObjectClass> BeliefState::classes() const {
    std::set<ObjectClass> unique;
    for (const ObjectInstance& obj : instances_) unique.insert(obj.cls);
    return {unique.begin(), unique.end()};
}

BeliefState BeliefState::with_position(const std::string& id, const Vec3& position) const {
    BeliefState next = *this;
    for (ObjectInstance& obj : next.instances_) {
        if (obj.id == id) {
            obj.position = position;
            next.revision_ += 1;
            return next;
        }
    }
    throw UnknownIdError("unknown object id \"" + id + "\"");
}

BeliefState BeliefState::restore(std::vector<ObjectInstance> instances,
                                 std::uint64_t revision) {
    BeliefState state = init_belief(std::move(instances));
    state.revision_ = revision;
    return state;
}

BeliefState init_belief(std::vector<ObjectInstance> objects) {
    std::set<std::string> seen;
    for (const ObjectInstance& obj : objects)
        if (!seen.insert(obj.id).second)
            throw DuplicateIdError("duplicate object id \"" + obj.id + "\"");
    BeliefState state;
    state.instances_ = std::move(objects);
    return state;
}

ResolveResult resolve_update(const BeliefState& belief, const ObservationBatch& batch) {
    // Group detection indices by class; std::map keeps record order stable.
    std::map<ObjectClass, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < batch.detections.size(); ++i)
        by_class[batch.detections[i].cls].push_back(i);

    ResolveResult result;
    result.state = belief;
    result.state.revision_ += 1;

    for (const auto& [cls, detection_rows] : by_class) {
        const std::vector<std::size_t> believed = belief.class_indices(cls);
        if (believed.empty())
            throw UnknownClassError("no believed instance of class \"" + cls + "\"");
        if (detection_rows.size() > believed.size())
            throw OverfullError("class \"" + cls + "\" has " +
                                std::to_string(detection_rows.size()) + " detections but only " +
                                std::to_string(believed.size()) + " believed instances");

        CostMatrix cost(detection_rows.size(), believed.size());
        for (std::size_t r = 0; r < detection_rows.size(); ++r)
            for (std::size_t c = 0; c < believed.size(); ++c)
                cost.at(r, c) = distance3(batch.detections[detection_rows[r]].position,
                                          belief.instances()[believed[c]].position);
        const Assignment assignment = min_cost_assignment(cost);

        AssignmentRecord record;
        record.cls = cls;
        for (std::size_t r = 0; r < detection_rows.size(); ++r) {
            const std::size_t inst_index = believed[assignment.col_of_row[r]];
            const std::size_t det_index = detection_rows[r];
            record.pairs.push_back({det_index, belief.instances()[inst_index].id,
                                    cost.at(r, assignment.col_of_row[r])});
            record.total_cost += cost.at(r, assignment.col_of_row[r]);
            result.state.instances_[inst_index].position =
                batch.detections[det_index].position;
        }
        result.records.push_back(std::move(record));
    }
    return result;
}

BeliefState add_object(const BeliefState& belief, const ObjectInstance& object) {
    if (belief.find(object.id) != nullptr)
        throw DuplicateIdError("duplicate object id \"" + object.id + "\"");
    BeliefState next = belief;
    next.instances_.push_back(object);
    next.revision_ += 1;
    return next;
}

BeliefState remove_object(const BeliefState& belief, const std::string& id) {
    BeliefState next = belief;
    std::vector<ObjectInstance>& instances = next.instances_;
    const auto it = std::find_if(instances.begin(), instances.end(),
                                 [&](const ObjectInstance& o) { return o.id == id; });
    if (it == instances.end()) throw UnknownIdError("unknown object id \"" + id + "\"");
    instances.erase(it);
    next.revision_ += 1;
    return next;
}

std::vector<ObjectInstance> visible_objects(const GridMap& grid, const Pose& observer,
                                            const FovParams& fov,
                                            const std::vector<ObjectInstance>& objects) {
    std::vector<ObjectInstance> seen;
    for (const ObjectInstance& obj : objects)
        if (in_fov(observer, fov, obj.position) &&
            line_of_sight(grid, observer.position, obj.position))
            seen.push_back(obj);
    return seen;
}

namespace {

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

}  // namespace

std::string serialize_belief(const BeliefState& belief, double timestamp) {
    std::ostringstream out;
    out << "revision " << belief.revision() << "\n";
    out << "timestamp " << format_fixed(timestamp) << "\n";
    for (const ObjectInstance& obj : belief.instances())
        out << obj.id << " \"" << obj.cls << "\" " << format_fixed(obj.position.x) << " "
            << format_fixed(obj.position.y) << " " << format_fixed(obj.position.z) << "\n";
    return out.str();
}

namespace {

// Splits an instance record: bare id, quoted-or-bare class, three numbers.
ObjectInstance parse_instance_line(const std::string& line, int line_no) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    };
    auto take_bare = [&]() -> std::string {
        const std::size_t start = pos;
        while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
        return line.substr(start, pos - start);
    };

    skip_space();
    const std::string id = take_bare();
    if (id.empty()) throw ParseError(line_no, "missing object id");

    skip_space();
    std::string cls;
    if (pos < line.size() && line[pos] == '"') {
        const std::size_t close = line.find('"', pos + 1);
        if (close == std::string::npos) throw ParseError(line_no, "unterminated class quote");
        cls = line.substr(pos + 1, close - pos - 1);
        pos = close + 1;
    } else {
        cls = take_bare();
    }
    if (cls.empty()) throw ParseError(line_no, "missing object class");

    double coords[3];
    for (double& c : coords) {
        skip_space();
        const std::string token = take_bare();
        if (token.empty()) throw ParseError(line_no, "missing coordinate");
        std::size_t used = 0;
        try {
            c = std::stod(token, &used);
        } catch (const std::exception&) {
            throw ParseError(line_no, "bad number \"" + token + "\"");
        }
        if (used != token.size()) throw ParseError(line_no, "bad number \"" + token + "\"");
    }
    skip_space();
    if (pos != line.size()) throw ParseError(line_no, "trailing text after coordinates");
    return {id, cls, {coords[0], coords[1], coords[2]}};
}

}  // namespace

ParsedBelief parse_belief(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::uint64_t revision = 0;
    double timestamp = 0.0;
    bool have_revision = false, have_timestamp = false;
    std::vector<ObjectInstance> instances;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string key;
        fields >> key;
        if (!have_revision) {
            if (key != "revision") throw ParseError(line_no, "expected revision header");
            if (!(fields >> revision)) throw ParseError(line_no, "bad revision value");
            have_revision = true;
            continue;
        }
        if (!have_timestamp) {
            if (key != "timestamp") throw ParseError(line_no, "expected timestamp header");
            if (!(fields >> timestamp)) throw ParseError(line_no, "bad timestamp value");
            have_timestamp = true;
            continue;
        }
        instances.push_back(parse_instance_line(line, line_no));
    }
    if (!have_revision || !have_timestamp)
        throw ParseError(line_no, "belief document ended before headers");

    ParsedBelief parsed;
    try {
        parsed.state = BeliefState::restore(std::move(instances), revision);
    } catch (const DuplicateIdError& e) {
        throw ParseError(line_no, e.what());
    }
    parsed.timestamp = timestamp;
    return parsed;
}

}  // namespace tomsim
