#pragma once
// Live simulator sessions behind ids. Each session owns its tick loop and an
// ordered command queue; subscribers receive state frames fan-out style and
// never slow the loop down.

#include <mscr/service/run_store.hpp>
#include <mscr/service/wire.hpp>
#include <mscr/sim/session.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace mscr::service {

class ServiceError : public Error {
 public:
  ServiceError(std::string code, const std::string& message, std::string path = {})
      : Error(message), code_(std::move(code)), path_(std::move(path)) {}
  const std::string& code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  std::string code_;
  std::string path_;
};

using Clock = std::function<double()>;  // seconds, monotone

inline double steady_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

/// Bounded mailbox for one subscriber. When it fills up, queued state frames
/// are discarded so the reader catches up on the latest one.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

  void push(WireMessage m) {
    {
      std::lock_guard lock(mu_);
      if (closed_) return;
      if (m.kind == Kind::state) {
        if (m.tick <= last_state_tick_) return;
        last_state_tick_ = m.tick;
      }
      if (q_.size() >= capacity_) {
        std::erase_if(q_, [](const WireMessage& x) { return x.kind == Kind::state; });
        ++dropped_;
      }
      q_.push_back(std::move(m));
    }
    cv_.notify_all();
  }

  /// Next message, or nullopt on timeout or after close with an empty queue.
  std::optional<WireMessage> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !q_.empty() || closed_; });
    if (q_.empty()) return std::nullopt;
    WireMessage m = std::move(q_.front());
    q_.pop_front();
    return m;
  }

  /// Drops any later state frame whose tick is not beyond `tick`.
  void skip_through(long tick) {
    std::lock_guard lock(mu_);
    last_state_tick_ = std::max(last_state_tick_, tick);
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_ && q_.empty();
  }
  long dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
  }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<WireMessage> q_;
  long last_state_tick_ = -1;
  long dropped_ = 0;
  bool closed_ = false;
};

struct ManagerOptions {
  std::filesystem::path data_dir = "data";
  bool autotick = true;             // false: sessions advance only through step()
  Clock clock = steady_seconds;     // used for command rate limiting
  int max_commands_per_second = 100;
  std::size_t subscriber_capacity = 512;
};

class SessionManager {
 public:
  explicit SessionManager(ManagerOptions opts = {}) : opts_(std::move(opts)), store_(opts_.data_dir) {}

  ~SessionManager() { shutdown(); }

  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  RunStore& store() { return store_; }

  /// Creates a session in HOLD. Scenario problems surface as a schema error
  /// carrying the JSON path.
  std::string create_session(const nlohmann::json& scenario, sim::RunMode mode, double speed = 1.0) {
    sim::Scenario sc;
    try {
      sc = sim::scenario_from_json(scenario);
    } catch (const SchemaError& e) {
      throw ServiceError(error_code::schema, e.what(), e.path());
    }
    if (!(speed >= 0.0 && std::isfinite(speed))) throw ServiceError(error_code::bad_request, "speed must be >= 0");
    try {
      store_.ensure();
    } catch (const StorageError& e) {
      throw ServiceError(error_code::storage_unavailable, e.what());
    }
    auto live = std::make_shared<Live>(sc, mode);
    live->speed = speed;
    {
      std::lock_guard lock(map_mu_);
      live->id = "s" + std::to_string(++counter_);
    }
    live->log.open(store_.log_path(live->id));
    if (!live->log) throw ServiceError(error_code::storage_unavailable, "cannot open run log");
    Live* raw = live.get();
    live->session.set_keep_events(false);
    live->session.set_sink([raw](const nlohmann::json& e) {
      raw->pending.push_back(e);
      raw->log << e.dump() << '\n';
    });
    {
      std::lock_guard lock(map_mu_);
      sessions_[live->id] = live;
      if (opts_.autotick) workers_.emplace_back([this, live] { run_loop(live); });
    }
    return live->id;
  }

  /// Queues a command; returns the tick at which it will be applied.
  long send_command(const std::string& id, const sim::UserCommand& cmd) {
    auto live = find(id);
    std::lock_guard lock(live->mu);
    if (live->session.finished()) throw ServiceError(error_code::unknown_session, "session '" + id + "' has ended");
    const double now = opts_.clock();
    while (!live->cmd_times.empty() && live->cmd_times.front() <= now - 1.0) live->cmd_times.pop_front();
    if (static_cast<int>(live->cmd_times.size()) >= opts_.max_commands_per_second)
      throw ServiceError(error_code::rate_limited,
                         "more than " + std::to_string(opts_.max_commands_per_second) + " commands per second");
    live->cmd_times.push_back(now);
    return live->session.enqueue(cmd);
  }

  /// Advances a session by n ticks regardless of its speed (batch use and tests).
  void step(const std::string& id, long n = 1) {
    auto live = find(id);
    for (long i = 0; i < n; ++i) {
      std::unique_lock lock(live->mu);
      if (live->session.finished()) break;
      step_locked(*live);
      if (live->session.finished()) {
        lock.unlock();
        retire(live);
        break;
      }
    }
  }

  /// Aborts a live session at its next tick and retires it immediately.
  sim::RunMetrics end_session(const std::string& id) {
    auto live = find(id);
    std::unique_lock lock(live->mu);
    if (!live->session.finished()) {
      live->session.enqueue(sim::UserCommand::of(sim::CommandKind::abort));
      while (!live->session.finished()) step_locked(*live);
    }
    const sim::RunMetrics m = live->session.metrics();
    lock.unlock();
    live->cv.notify_all();
    retire(live);
    return m;
  }

  void set_speed(const std::string& id, double speed) {
    if (!(speed >= 0.0 && std::isfinite(speed))) throw ServiceError(error_code::bad_request, "speed must be >= 0");
    auto live = find(id);
    {
      std::lock_guard lock(live->mu);
      live->speed = speed;
      live->rebase = true;
    }
    live->cv.notify_all();
  }

  /// Late subscribers get the latest frame first. With after_tick set, only
  /// frames newer than that tick are delivered.
  std::shared_ptr<Subscription> subscribe(const std::string& id, std::optional<long> after_tick = std::nullopt) {
    auto live = find(id);
    auto sub = std::make_shared<Subscription>(opts_.subscriber_capacity);
    std::lock_guard lock(live->mu);
    if (after_tick) sub->skip_through(*after_tick);
    if (live->latest && (!after_tick || live->latest->tick > *after_tick)) sub->push(*live->latest);
    live->subs.push_back(sub);
    return sub;
  }

  std::vector<RunSummary> fetch_runs(const RunFilter& filter = {}) const {
    try {
      return store_.fetch(filter);
    } catch (const StorageError& e) {
      throw ServiceError(error_code::storage_unavailable, e.what());
    }
  }

  std::optional<nlohmann::json> latest_state(const std::string& id) {
    auto live = find(id);
    std::lock_guard lock(live->mu);
    if (!live->latest) return std::nullopt;
    return live->latest->payload;
  }

  std::size_t live_sessions() const {
    std::lock_guard lock(map_mu_);
    return sessions_.size();
  }

  bool is_live(const std::string& id) const {
    std::lock_guard lock(map_mu_);
    return sessions_.count(id) > 0;
  }

  void shutdown() {
    std::vector<std::shared_ptr<Live>> all;
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(map_mu_);
      for (auto& [_, l] : sessions_) all.push_back(l);
      workers.swap(workers_);
    }
    for (auto& l : all) {
      {
        std::lock_guard lock(l->mu);
        l->stop = true;
      }
      l->cv.notify_all();
    }
    for (auto& w : workers)
      if (w.joinable()) w.join();
    for (auto& l : all) {
      std::lock_guard lock(l->mu);
      for (auto& s : l->subs)
        if (auto p = s.lock()) p->close();
    }
  }

 private:
  struct Live {
    Live(const sim::Scenario& sc, sim::RunMode mode) : session(sc, mode, sim::Phase::hold) {}
    std::string id;
    sim::Session session;
    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::weak_ptr<Subscription>> subs;
    std::optional<WireMessage> latest;
    std::vector<nlohmann::json> pending;
    std::deque<double> cmd_times;
    std::ofstream log;
    double speed = 1.0;
    bool rebase = true;
    bool stop = false;
    bool retired = false;
  };

  std::shared_ptr<Live> find(const std::string& id) const {
    std::lock_guard lock(map_mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(error_code::unknown_session, "unknown session '" + id + "'");
    return it->second;
  }

  void publish(Live& l, const WireMessage& m) {
    std::erase_if(l.subs, [](const std::weak_ptr<Subscription>& w) { return w.expired(); });
    for (auto& w : l.subs)
      if (auto s = w.lock()) s->push(m);
  }

  void step_locked(Live& l) {
    l.session.step();
    for (auto& e : l.pending) {
      const long tick = e.at("tick").get<long>();
      if (e.at("type") == "state") {
        WireMessage m{Kind::state, l.id, tick, std::move(e)};
        l.latest = m;
        publish(l, m);
      } else {
        publish(l, WireMessage{Kind::event, l.id, tick, std::move(e)});
      }
    }
    l.pending.clear();
    if (l.session.finished()) {
      l.log.close();
      publish(l, WireMessage{Kind::metrics, l.id, l.session.tick(), sim::to_json(l.session.metrics())});
      for (auto& w : l.subs)
        if (auto s = w.lock()) s->close();
    }
  }

  void retire(const std::shared_ptr<Live>& l) {
    {
      std::lock_guard lock(l->mu);
      if (l->retired) return;
      l->retired = true;
    }
    l->cv.notify_all();
    RunSummary r{l->id, l->session.scenario().name, std::string(sim::run_mode_name(l->session.run_mode())),
                 l->session.scenario().seed, l->session.metrics()};
    {
      std::lock_guard lock(map_mu_);
      sessions_.erase(l->id);
    }
    try {
      store_.append(r);
    } catch (const StorageError&) {
      // The run log is already on disk; the summary can be rebuilt from it.
    }
  }

  void run_loop(std::shared_ptr<Live> l) {
    using clock = std::chrono::steady_clock;
    clock::time_point base;
    long base_tick = 0;
    std::unique_lock lock(l->mu);
    while (!l->stop && !l->session.finished()) {
      if (l->speed <= 0.0) {
        l->cv.wait(lock, [&] { return l->stop || l->speed > 0.0; });
        l->rebase = true;
        continue;
      }
      if (l->rebase) {
        base = clock::now();
        base_tick = l->session.tick();
        l->rebase = false;
      }
      // Tick k may run no earlier than base + (k - base_tick) / (27 * speed).
      const auto due = base + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(
                                  static_cast<double>(l->session.tick() - base_tick) / (sim::kTickRate * l->speed)));
      if (clock::now() < due) {
        l->cv.wait_until(lock, due, [&] { return l->stop || l->rebase; });
        continue;
      }
      step_locked(*l);
    }
    const bool done = l->session.finished();
    lock.unlock();
    if (done) retire(l);
  }

  ManagerOptions opts_;
  mutable RunStore store_;
  mutable std::mutex map_mu_;
  std::map<std::string, std::shared_ptr<Live>> sessions_;
  std::vector<std::thread> workers_;
  long counter_ = 0;
};

}  // namespace mscr::service
