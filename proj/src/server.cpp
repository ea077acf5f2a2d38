// SPDX-License-Identifier: Apache-2.0
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <istream>
#include <ostream>
#include <thread>

#include "toolgym/harness.hpp"

namespace toolgym {

json observation_to_json(const Observation& obs) {
    json history = json::array();
    for (const ChatMessage& m : obs.history)
        history.push_back({{"role", m.role}, {"text", m.text}});
    return json{{"system_prompt", obs.system_prompt},
                {"history", std::move(history)},
                {"current_user_text", obs.current_user_text},
                {"turn_index", obs.turn_index},
                {"steps_in_turn", obs.steps_in_turn},
                {"steps_total", obs.steps_total},
                {"step_budget", obs.step_budget},
                {"credentials", obs.credentials},
                {"tools", obs.registry ? obs.registry->describe() : json::array()}};
}

ServerSession::ServerSession(const std::vector<Scenario>& corpus,
                             const MessageCatalog& catalog)
    : corpus_(&corpus), catalog_(&catalog) {}

json ServerSession::handle(const json& req) {
    auto err = [](const char* kind, const std::string& detail) {
        return json{{"error", kind}, {"detail", detail}};
    };
    if (!req.is_object() || !req.contains("op") || !req["op"].is_string())
        return err("bad-request", "request must be an object with a string \"op\"");
    const std::string op = req["op"].get<std::string>();

    if (op == "shutdown") {
        shutdown_ = true;
        episode_.reset();
        return json{{"ok", true}};
    }

    if (op == "reset") {
        if (!req.contains("scenario_id") || !req["scenario_id"].is_string())
            return err("bad-request", "reset requires a string \"scenario_id\"");
        const std::string id = req["scenario_id"].get<std::string>();
        const Scenario* sc = find_scenario(*corpus_, id);
        if (!sc) return err("not-found", "unknown scenario_id: " + id);
        FeedbackMode mode = FeedbackMode::Standard;
        if (req.contains("mode")) {
            if (!req["mode"].is_string())
                return err("bad-request", "\"mode\" must be a string");
            try {
                mode = feedback_mode_from_name(req["mode"].get<std::string>());
            } catch (const std::invalid_argument& e) {
                return err("bad-request", e.what());
            }
        }
        int budget = kDefaultStepBudget;
        if (req.contains("step_budget")) {
            if (!req["step_budget"].is_number_integer() || req["step_budget"].get<int>() < 1)
                return err("bad-request", "\"step_budget\" must be a positive integer");
            budget = req["step_budget"].get<int>();
        }
        episode_ = std::make_unique<EpisodeSession>(*sc, mode, *catalog_, budget);
        return json{{"observation", observation_to_json(episode_->observation())}};
    }

    if (op == "step") {
        if (!episode_ || episode_->done()) {
            episode_.reset();
            return err("no-episode", "reset a scenario before stepping");
        }
        if (!req.contains("raw") || !req["raw"].is_string())
            return err("bad-request", "step requires a string \"raw\"");
        int turns_before = episode_->trajectory().completed_turns();
        episode_->step(req["raw"].get<std::string>());
        bool ep_done = episode_->done();
        json resp = {
            {"observation",
             ep_done ? json(nullptr) : observation_to_json(episode_->observation())},
            {"turn_done", episode_->trajectory().completed_turns() > turns_before},
            {"episode_done", ep_done},
            {"reward", nullptr}};
        if (ep_done) {
            resp["reward"] = reward_breakdown_to_json(
                progress_reward(episode_->trajectory(), episode_->scenario(), *catalog_));
            episode_.reset();
        }
        return resp;
    }

    return err("bad-request", "unknown op: " + op);
}

void serve_stream(std::istream& in, std::ostream& out,
                  const std::vector<Scenario>& corpus, const MessageCatalog& catalog) {
    ServerSession session(corpus, catalog);
    std::string line;
    while (!session.shutdown_requested() && std::getline(in, line)) {
        if (line.empty()) continue;
        json req = json::parse(line, nullptr, false);
        json resp = req.is_discarded()
                        ? json{{"error", "bad-request"}, {"detail", "unparseable JSON line"}}
                        : session.handle(req);
        out << resp.dump() << "\n" << std::flush;
    }
}

namespace {

bool write_all(int fd, const std::string& data) {
    size_t off = 0;
    while (off < data.size()) {
        ssize_t n = ::write(fd, data.data() + off, data.size() - off);
        if (n <= 0) return false;
        off += size_t(n);
    }
    return true;
}

void serve_connection(int cfd, const std::vector<Scenario>& corpus,
                      const MessageCatalog& catalog, std::atomic<bool>& stop) {
    ServerSession session(corpus, catalog);
    std::string pending;
    char chunk[4096];
    ssize_t n;
    while (!session.shutdown_requested() && (n = ::read(cfd, chunk, sizeof chunk)) > 0) {
        pending.append(chunk, size_t(n));
        size_t pos;
        while ((pos = pending.find('\n')) != std::string::npos) {
            std::string line = pending.substr(0, pos);
            pending.erase(0, pos + 1);
            if (line.empty()) continue;
            json req = json::parse(line, nullptr, false);
            json resp =
                req.is_discarded()
                    ? json{{"error", "bad-request"}, {"detail", "unparseable JSON line"}}
                    : session.handle(req);
            if (!write_all(cfd, resp.dump() + "\n")) break;
            if (session.shutdown_requested()) {
                stop = true;
                break;
            }
        }
    }
    ::close(cfd);
}

}  // namespace

int serve_unix_socket(const std::string& path, const std::vector<Scenario>& corpus,
                      const MessageCatalog& catalog) {
    int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd < 0) return 1;
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (path.empty() || path.size() >= sizeof(addr.sun_path)) {
        ::close(fd);
        return 1;
    }
    std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
    ::unlink(path.c_str());
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
        ::listen(fd, 8) != 0) {
        ::close(fd);
        return 1;
    }

    std::atomic<bool> stop{false};
    std::vector<std::thread> workers;
    while (!stop.load()) {
        pollfd pfd{fd, POLLIN, 0};
        int ready = ::poll(&pfd, 1, 200);
        if (ready < 0) break;
        if (ready == 0) continue;
        int cfd = ::accept(fd, nullptr, nullptr);
        if (cfd < 0) continue;
        workers.emplace_back(serve_connection, cfd, std::cref(corpus), std::cref(catalog),
                             std::ref(stop));
    }
    for (std::thread& w : workers) w.join();
    ::close(fd);
    ::unlink(path.c_str());
    return 0;
}

}  // namespace toolgym
