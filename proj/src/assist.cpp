#include "tomsim/assist.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "tomsim/errors.hpp"

namespace tomsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

RelevanceMap RelevanceMap::load(std::istream& in) {
    RelevanceMap map;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t colon = stripped.find(':');
        if (colon == std::string::npos)
            throw ParseError(line_no, "expected `activity: class, class, ...`");
        const std::string activity = trim(stripped.substr(0, colon));
        if (activity.empty()) throw ParseError(line_no, "empty activity name");
        if (map.activities.count(activity) != 0)
            throw ParseError(line_no, "activity \"" + activity + "\" listed twice");
        std::set<ObjectClass>& classes = map.activities[activity];
        std::stringstream rest(stripped.substr(colon + 1));
        std::string item;
        while (std::getline(rest, item, ',')) {
            const std::string cls = trim(item);
            if (!cls.empty()) classes.insert(cls);
        }
        if (classes.empty())
            throw ParseError(line_no, "activity \"" + activity + "\" lists no classes");
    }
    return map;
}

RelevanceMap RelevanceMap::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open relevance map \"" + path + "\"");
    return load(in);
}

UnawareSet unaware_objects(const BeliefState& robot, const BeliefState& inferred, double tau) {
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
    UnawareSet result;
    result.tau = tau;
    for (const ObjectInstance& obj : robot.instances()) {
        double nearest = -1.0;
        for (std::size_t i : inferred.class_indices(obj.cls)) {
            const double d = distance3(obj.position, inferred.instances()[i].position);
            if (nearest < 0.0 || d < nearest) nearest = d;
        }
        if (nearest < 0.0 || nearest > tau) result.objects.push_back(obj);
    }
    std::sort(result.objects.begin(), result.objects.end(),
              [](const ObjectInstance& a, const ObjectInstance& b) { return a.id < b.id; });
    return result;
}

NotifySet relevant_subset(const UnawareSet& unaware, const std::string& activity,
                          const RelevanceMap& relevance) {
    const auto it = relevance.activities.find(activity);
    if (it == relevance.activities.end())
        throw UnknownActivityError("unknown activity \"" + activity + "\"");
    NotifySet result;
    result.activity = activity;
    for (const ObjectInstance& obj : unaware.objects)
        if (it->second.count(obj.cls) != 0) result.objects.push_back(obj);
    // unaware.objects is already id-sorted; the filter keeps that order.
    return result;
}

NotifyScore score_notifications(const NotifySet& predicted,
                                const std::vector<ObjectInstance>& truth) {
    std::set<std::string> predicted_ids, truth_ids;
    for (const ObjectInstance& obj : predicted.objects) predicted_ids.insert(obj.id);
    for (const ObjectInstance& obj : truth) truth_ids.insert(obj.id);

    std::size_t overlap = 0;
    for (const std::string& id : predicted_ids) overlap += truth_ids.count(id);

    NotifyScore score;
    score.precision = predicted_ids.empty()
                          ? 1.0
                          : static_cast<double>(overlap) /
                                static_cast<double>(predicted_ids.size());
    score.recall = truth_ids.empty() ? 1.0
                                     : static_cast<double>(overlap) /
                                           static_cast<double>(truth_ids.size());
    const double denom = score.precision + score.recall;
    score.f1 = denom == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / denom;
    return score;
}

namespace {

struct Pipe {
    int fds[2] = {-1, -1};
    bool open() { return ::pipe(fds) == 0; }
    void close_read() {
        if (fds[0] >= 0) ::close(fds[0]);
        fds[0] = -1;
    }
    void close_write() {
        if (fds[1] >= 0) ::close(fds[1]);
        fds[1] = -1;
    }
    ~Pipe() {
        close_read();
        close_write();
    }
};

// Reads until newline or EOF with an overall deadline. Returns false on
// timeout or read error.
bool read_line_with_timeout(int fd, int timeout_ms, std::string& out) {
    out.clear();
    for (;;) {
        struct pollfd pfd {
            fd, POLLIN, 0
        };
        const int ready = ::poll(&pfd, 1, timeout_ms);
        if (ready <= 0) return false;
        char buf[256];
        const ssize_t got = ::read(fd, buf, sizeof(buf));
        if (got < 0) return false;
        if (got == 0) return !out.empty();
        for (ssize_t i = 0; i < got; ++i) {
            if (buf[i] == '\n') {
                out.append(buf, static_cast<std::size_t>(i));
                return true;
            }
        }
        out.append(buf, static_cast<std::size_t>(got));
    }
}

}  // namespace

std::optional<std::vector<ObjectClass>> ExternalReasoner::query(
    const std::string& activity, const std::vector<ObjectClass>& candidates) const {
    Pipe to_child, from_child;
    if (!to_child.open() || !from_child.open()) return std::nullopt;

    const pid_t pid = ::fork();
    if (pid < 0) return std::nullopt;
    if (pid == 0) {
        ::dup2(to_child.fds[0], STDIN_FILENO);
        ::dup2(from_child.fds[1], STDOUT_FILENO);
        ::close(to_child.fds[0]);
        ::close(to_child.fds[1]);
        ::close(from_child.fds[0]);
        ::close(from_child.fds[1]);
        ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }

    to_child.close_read();
    from_child.close_write();

    std::string request = activity + "\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i != 0) request += '\t';
        request += candidates[i];
    }
    request += '\n';

    // A dead child must surface as a failed write, not a fatal signal.
    struct sigaction ignore {}, previous {};
    ignore.sa_handler = SIG_IGN;
    ::sigaction(SIGPIPE, &ignore, &previous);
    const bool wrote =
        ::write(to_child.fds[1], request.data(), request.size()) ==
        static_cast<ssize_t>(request.size());
    to_child.close_write();

    std::string reply;
    const bool got_reply =
        wrote && read_line_with_timeout(from_child.fds[0], timeout_ms_, reply);
    from_child.close_read();
    ::sigaction(SIGPIPE, &previous, nullptr);

    if (!got_reply) ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    if (!got_reply) return std::nullopt;

    std::set<ObjectClass> allowed(candidates.begin(), candidates.end());
    std::vector<ObjectClass> selected;
    std::stringstream fields(reply);
    std::string field;
    while (std::getline(fields, field, '\t')) {
        const std::string cls = trim(field);
        if (cls.empty()) continue;
        if (allowed.count(cls) == 0) return std::nullopt;  // malformed reply
        selected.push_back(cls);
    }
    return selected;
}

NotifySet select_relevant(const UnawareSet& unaware, const std::string& activity,
                          const RelevanceMap& relevance, const ExternalReasoner* reasoner) {
    if (reasoner != nullptr) {
        std::set<ObjectClass> candidates;
        for (const ObjectInstance& obj : unaware.objects) candidates.insert(obj.cls);
        const auto picked =
            reasoner->query(activity, {candidates.begin(), candidates.end()});
        if (picked.has_value()) {
            const std::set<ObjectClass> chosen(picked->begin(), picked->end());
            NotifySet result;
            result.activity = activity;
            for (const ObjectInstance& obj : unaware.objects)
                if (chosen.count(obj.cls) != 0) result.objects.push_back(obj);
            return result;
        }
        std::cerr << "external reasoner unavailable for \"" << activity
                  << "\"; using the rule-based relevance map\n";
    }
    return relevant_subset(unaware, activity, relevance);
}

}  // namespace tomsim
