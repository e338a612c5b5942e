#ifndef SIMDIALOG_SERVER_HPP
#define SIMDIALOG_SERVER_HPP

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <list>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <unordered_map>

#include "simdialog/wire.hpp"

namespace simdialog {

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint64_t default_seed = 0;
  SessionOptions session;
};

namespace detail {

/// Pending server-sent events for one open stream.
struct Subscriber {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::string> events;
};

/// A live session plus the streams watching it. All access goes through
/// `mutex`, which serializes requests against the same session.
struct SessionSlot {
  explicit SessionSlot(Session s) : session(std::move(s)) {}

  std::mutex mutex;
  Session session;
  std::uint64_t sequence = 0;
  std::list<std::weak_ptr<Subscriber>> subscribers;

  void publish(const std::string& event) {
    for (auto it = subscribers.begin(); it != subscribers.end();) {
      if (auto sub = it->lock()) {
        {
          std::lock_guard lock(sub->mutex);
          sub->events.push_back(event);
        }
        sub->ready.notify_all();
        ++it;
      } else {
        it = subscribers.erase(it);
      }
    }
  }
};

inline int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidPhase: return 409;
    case ErrorCode::InvalidChoice:
    case ErrorCode::InvalidArgument: return 400;
    default: return 422;
  }
}

}  // namespace detail

/// HTTP + server-sent-event API over one loaded project. Sessions are
/// isolated; requests on the same session are serialized.
class SimServer {
 public:
  SimServer(std::shared_ptr<const DialogGraph> graph, ServerOptions options = {})
      : graph_(std::move(graph)), options_(std::move(options)), ids_(std::random_device{}()) {
    routes();
  }

  ~SimServer() { stop(); }

  SimServer(const SimServer&) = delete;
  SimServer& operator=(const SimServer&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
  int bind(int port = 0) {
    if (port == 0) return http_.bind_to_any_port(options_.host);
    return http_.bind_to_port(options_.host, port) ? port : -1;
  }

  /// Serves until stop(); call after bind().
  bool run() { return http_.listen_after_bind(); }

  void stop() {
    stopping_ = true;
    http_.stop();
  }

  bool running() const { return http_.is_running(); }
  void wait_until_ready() const { http_.wait_until_ready(); }

  std::size_t session_count() const {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
  }

 private:
  using json = wire::json;

  static void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
    send_json(res, {{"error", {{"code", code}, {"message", message}}}}, status);
  }

  static json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) throw Error(ErrorCode::InvalidArgument, "request body is not a JSON object");
    return body;
  }

  /// Runs a handler, mapping library errors and bad JSON onto HTTP statuses.
  template <class Fn>
  static void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_error(res, detail::status_for(e.code()), to_string(e.code()), e.detail());
    } catch (const json::exception& e) {
      send_error(res, 400, "InvalidArgument", e.what());
    }
  }

  std::shared_ptr<detail::SessionSlot> find(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
    return it->second;
  }

  std::string fresh_id() {
    std::lock_guard lock(registry_mutex_);
    std::string id;
    do {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ids_()));
      id = "s" + std::to_string(++created_) + "-" + buf;
    } while (sessions_.contains(id));
    return id;
  }

  static json snapshot(const std::string& id, const detail::SessionSlot& slot) {
    json s = wire::snapshot_json(slot.session);
    s["sessionId"] = id;
    s["sequence"] = slot.sequence;
    return s;
  }

  /// Applies a mutation under the session lock; on success bumps the
  /// sequence, publishes exactly one event and returns the new snapshot.
  template <class Fn>
  void mutate(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
    guarded(res, [&] {
      const std::string id = req.path_params.at("id");
      auto slot = find(id);
      const json body = parse_body(req);
      std::lock_guard lock(slot->mutex);
      fn(slot->session, body);
      ++slot->sequence;
      json snap = snapshot(id, *slot);
      slot->publish("event: snapshot\nid: " + std::to_string(slot->sequence) + "\ndata: " + snap.dump() + "\n\n");
      send_json(res, snap);
    });
  }

  void routes() {
    http_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"status", "ok"}, {"wireVersion", wire::kWireVersion}});
    });

    http_.Get("/project", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, wire::project_json(graph_->project()));
    });

    http_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = parse_body(req);
        if (!body.contains("startName") || !body["startName"].is_string())
          throw Error(ErrorCode::InvalidArgument, "startName is required");
        const auto start = body["startName"].get<std::string>();
        const SelectionPolicy policy = wire::policy_from_json(body, options_.default_seed);
        std::vector<StateEdit> overrides;
        for (const auto& o : body.value("overrides", json::array()))
          overrides.push_back({o.at("scope").get<std::string>(), o.at("name").get<std::string>(), o.at("value").get<double>()});
        auto slot = std::make_shared<detail::SessionSlot>(Session::start(graph_, start, policy, overrides, options_.session));
        const std::string id = fresh_id();
        {
          std::lock_guard lock(registry_mutex_);
          sessions_.emplace(id, slot);
        }
        std::lock_guard lock(slot->mutex);
        send_json(res, {{"sessionId", id}, {"snapshot", snapshot(id, *slot)}}, 201);
      });
    });

    http_.Get("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.path_params.at("id");
        auto slot = find(id);
        std::lock_guard lock(slot->mutex);
        send_json(res, snapshot(id, *slot));
      });
    });

    http_.Delete("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.path_params.at("id");
        std::lock_guard lock(registry_mutex_);
        if (sessions_.erase(id) == 0) throw Error(ErrorCode::NotFound, "unknown session '" + id + "'");
        res.status = 204;
      });
    });

    http_.Post("/sessions/:id/choose", [this](const httplib::Request& req, httplib::Response& res) {
      mutate(req, res, [](Session& session, const json& body) {
        if (!body.contains("nodeId") || !body["nodeId"].is_string())
          throw Error(ErrorCode::InvalidArgument, "nodeId is required");
        session.choose(body["nodeId"].get<std::string>());
      });
    });

    http_.Post("/sessions/:id/state", [this](const httplib::Request& req, httplib::Response& res) {
      mutate(req, res, [](Session& session, const json& body) {
        if (!body.contains("value") || !body["value"].is_number())
          throw Error(ErrorCode::InvalidArgument, "numeric value is required");
        session.set_state(body.at("scope").get<std::string>(), body.at("name").get<std::string>(), body["value"].get<double>());
      });
    });

    // Stateless stream: only changes made after subscribing are sent.
    http_.Get("/sessions/:id/events", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto slot = find(req.path_params.at("id"));
        auto sub = std::make_shared<detail::Subscriber>();
        {
          std::lock_guard lock(slot->mutex);
          slot->subscribers.push_back(sub);
        }
        sub->events.push_back(": subscribed\n\n");
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream",
            [this, sub](std::size_t, httplib::DataSink& sink) {
              std::unique_lock lock(sub->mutex);
              sub->ready.wait_for(lock, std::chrono::milliseconds(100),
                                  [&] { return !sub->events.empty() || stopping_.load(); });
              if (stopping_) {
                sink.done();
                return true;
              }
              while (!sub->events.empty()) {
                std::string event = std::move(sub->events.front());
                sub->events.pop_front();
                lock.unlock();
                if (!sink.write(event.data(), event.size())) return false;
                lock.lock();
              }
              return sink.is_writable();
            },
            [sub](bool) { /* the weak_ptr in the slot expires with `sub` */ });
      });
    });
  }

  std::shared_ptr<const DialogGraph> graph_;
  ServerOptions options_;
  httplib::Server http_;
  std::atomic<bool> stopping_{false};

  mutable std::mutex registry_mutex_;
  std::unordered_map<std::string, std::shared_ptr<detail::SessionSlot>> sessions_;
  std::mt19937_64 ids_;
  std::uint64_t created_ = 0;
};

}  // namespace simdialog

#endif  // SIMDIALOG_SERVER_HPP
