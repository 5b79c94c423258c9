#pragma once
// Socket transport for the session service. Clients send `request` frames
// (payload {"op": ..., "request_id": ...}) or bare `command` frames; the server
// answers with `response` or `error` frames and pushes subscribed session
// streams on the same connection.

#include <mscr/service/session_manager.hpp>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <list>

namespace mscr::service {

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 7878;
};

inline constexpr const char* kAddrEnv = "MSCR_SERVICE_ADDR";

/// Parses "host:port" (or ":port", or "port").
inline Endpoint parse_endpoint(std::string_view s) {
  Endpoint e;
  const auto colon = s.rfind(':');
  const std::string_view port = colon == std::string_view::npos ? s : s.substr(colon + 1);
  if (colon != std::string_view::npos && colon > 0) e.host = std::string(s.substr(0, colon));
  char* end = nullptr;
  const std::string ps(port);
  const long p = std::strtol(ps.c_str(), &end, 10);
  if (ps.empty() || *end != '\0' || p < 0 || p > 65535) throw DomainError("bad endpoint '" + std::string(s) + "'");
  e.port = static_cast<int>(p);
  return e;
}

/// The env override wins over the fallback.
inline Endpoint endpoint_from_env(const Endpoint& fallback = {}) {
  if (const char* v = std::getenv(kAddrEnv); v && *v) return parse_endpoint(v);
  return fallback;
}

namespace detail {

inline bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

inline bool read_exact(int fd, char* buf, std::size_t n) {
  while (n > 0) {
    const ssize_t r = ::recv(fd, buf, n, 0);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    buf += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

/// Reads one frame body. Returns nullopt on EOF; throws on oversize frames.
inline std::optional<std::string> read_frame(int fd) {
  unsigned char hdr[4];
  if (!read_exact(fd, reinterpret_cast<char*>(hdr), 4)) return std::nullopt;
  const auto n = decode_length(hdr);
  if (n > kMaxFrameBytes) throw SchemaError("$", "frame exceeds " + std::to_string(kMaxFrameBytes) + " bytes");
  std::string body(n, '\0');
  if (!read_exact(fd, body.data(), n)) return std::nullopt;
  return body;
}

inline bool wait_readable(int fd, std::chrono::milliseconds timeout) {
  pollfd p{fd, POLLIN, 0};
  return ::poll(&p, 1, static_cast<int>(timeout.count())) > 0;
}

}  // namespace detail

class Server {
 public:
  Server(SessionManager& mgr, Endpoint ep) : mgr_(mgr), ep_(std::move(ep)) {}
  ~Server() { stop(); }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting. A port of 0 picks a free one; see port().
  void start() {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (::getaddrinfo(ep_.host.c_str(), std::to_string(ep_.port).c_str(), &hints, &res) != 0 || !res)
      throw Error("cannot resolve '" + ep_.host + "'");
    listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    const int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    const bool ok = listen_fd_ >= 0 && ::bind(listen_fd_, res->ai_addr, res->ai_addrlen) == 0 &&
                    ::listen(listen_fd_, 16) == 0;
    ::freeaddrinfo(res);
    if (!ok) {
      const std::string why = std::strerror(errno);
      if (listen_fd_ >= 0) ::close(listen_fd_);
      listen_fd_ = -1;
      throw Error("cannot listen on " + ep_.host + ":" + std::to_string(ep_.port) + ": " + why);
    }
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    running_ = true;
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  int port() const { return port_; }

  void stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    if (acceptor_.joinable()) acceptor_.join();
    std::list<std::shared_ptr<Conn>> conns;
    {
      std::lock_guard lock(mu_);
      conns.swap(conns_);
    }
    for (auto& c : conns) c->shut();
    for (auto& c : conns) c->join();
  }

 private:
  struct Conn {
    int fd = -1;
    std::mutex write_mu;
    std::mutex subs_mu;
    std::map<std::string, std::shared_ptr<Subscription>> subs;
    std::vector<std::thread> pumps;
    std::thread reader;
    std::atomic<bool> open{true};

    bool send(const WireMessage& m) {
      std::lock_guard lock(write_mu);
      return open && detail::write_all(fd, encode_frame(m));
    }
    void shut() {
      open = false;
      ::shutdown(fd, SHUT_RDWR);
      std::lock_guard lock(subs_mu);
      for (auto& [_, s] : subs) s->close();
    }
    void join() {
      if (reader.joinable()) reader.join();
      std::vector<std::thread> ps;
      {
        std::lock_guard lock(subs_mu);
        ps.swap(pumps);
      }
      for (auto& t : ps)
        if (t.joinable()) t.join();
      ::close(fd);
    }
  };

  void accept_loop() {
    while (running_) {
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) {
        if (!running_) break;
        continue;
      }
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      auto c = std::make_shared<Conn>();
      c->fd = fd;
      std::lock_guard lock(mu_);
      if (!running_) {
        ::close(fd);
        break;
      }
      conns_.push_back(c);
      c->reader = std::thread([this, c] { serve(c); });
    }
  }

  void serve(const std::shared_ptr<Conn>& c) {
    while (c->open) {
      std::optional<std::string> body;
      try {
        body = detail::read_frame(c->fd);
      } catch (const SchemaError& e) {
        c->send(error_message({}, error_code::schema, e.what(), e.path()));
        break;
      }
      if (!body) break;
      c->send(handle(*c, *body));
    }
    c->open = false;
    std::lock_guard lock(c->subs_mu);
    for (auto& [_, s] : c->subs) s->close();
  }

  WireMessage handle(Conn& c, const std::string& body) {
    nlohmann::json request_id = nullptr;
    std::string session;
    try {
      const auto msg = message_from_json(parse_json(body));
      session = msg.session;
      if (msg.kind == Kind::command) {
        const long tick = mgr_.send_command(msg.session, sim::command_from_json(JsonView(msg.payload, "$.payload")));
        return {Kind::response, msg.session, tick, {{"op", "command"}, {"tick", tick}}};
      }
      if (msg.kind != Kind::request)
        throw ServiceError(error_code::bad_request, "clients may send only request or command frames");
      request_id = msg.payload.value("request_id", nlohmann::json(nullptr));
      auto out = dispatch(c, JsonView(msg.payload, "$.payload"), session);
      out.payload["op"] = msg.payload.at("op");
      if (!request_id.is_null()) out.payload["request_id"] = request_id;
      return out;
    } catch (const ServiceError& e) {
      return error_message(session, e.code(), e.what(), e.path(), request_id);
    } catch (const SchemaError& e) {
      return error_message(session, error_code::schema, e.what(), e.path(), request_id);
    } catch (const DomainError& e) {
      return error_message(session, error_code::bad_request, e.what(), {}, request_id);
    } catch (const std::exception& e) {
      return error_message(session, error_code::internal, e.what(), {}, request_id);
    }
  }

  WireMessage dispatch(Conn& c, const JsonView& p, std::string& session) {
    const std::string op = p.at("op").string();
    const auto sid = [&] {
      session = p.at("session").string();
      return session;
    };
    if (op == "health") {
      p.object({"op", "request_id"});
      return {Kind::response, {}, 0,
              {{"status", "ok"}, {"live_sessions", mgr_.live_sessions()}, {"tick_rate", sim::kTickRate}}};
    }
    if (op == "create_session") {
      p.object({"op", "request_id", "scenario", "mode", "speed"});
      sim::RunMode mode = sim::RunMode::manual;
      if (p.has("mode")) {
        try {
          mode = sim::run_mode_from_name(p.at("mode").string());
        } catch (const SchemaError&) {
          throw;
        } catch (const DomainError& e) {
          p.at("mode").fail(e.what());
        }
      }
      const auto sc = p.at("scenario");
      if (!sc.raw().is_object()) sc.fail("expected an object");
      std::string id;
      try {
        id = mgr_.create_session(sc.raw(), mode, p.number("speed", 1.0));
      } catch (const ServiceError& e) {
        if (e.code() == error_code::schema) {
          // Re-anchor the scenario path under the request payload.
          const std::string path = e.path().rfind('$', 0) == 0 ? sc.path() + e.path().substr(1) : e.path();
          throw ServiceError(e.code(), e.what(), path);
        }
        throw;
      }
      session = id;
      return {Kind::response, id, 0, {{"session", id}}};
    }
    if (op == "send_command") {
      p.object({"op", "request_id", "session", "command"});
      const auto id = sid();
      const long tick = mgr_.send_command(id, sim::command_from_json(p.at("command")));
      return {Kind::response, id, tick, {{"tick", tick}}};
    }
    if (op == "subscribe") {
      p.object({"op", "request_id", "session", "after_tick"});
      const auto id = sid();
      std::optional<long> after;
      if (p.has("after_tick")) after = p.at("after_tick").integer();
      auto sub = mgr_.subscribe(id, after);
      {
        std::lock_guard lock(c.subs_mu);
        if (auto it = c.subs.find(id); it != c.subs.end()) it->second->close();
        c.subs[id] = sub;
        c.pumps.emplace_back([&c, sub] { pump(c, sub); });
      }
      return {Kind::response, id, 0, {{"subscribed", true}}};
    }
    if (op == "unsubscribe") {
      p.object({"op", "request_id", "session"});
      const auto id = sid();
      std::lock_guard lock(c.subs_mu);
      const auto it = c.subs.find(id);
      const bool had = it != c.subs.end();
      if (had) {
        it->second->close();
        c.subs.erase(it);
      }
      return {Kind::response, id, 0, {{"subscribed", false}, {"was_subscribed", had}}};
    }
    if (op == "fetch_runs") {
      p.object({"op", "request_id", "filter"});
      RunFilter f;
      if (p.has("filter")) {
        const auto fv = p.at("filter");
        fv.object({"mode", "scenario"});
        if (fv.has("mode")) f.mode = fv.at("mode").string();
        if (fv.has("scenario")) f.scenario = fv.at("scenario").string();
      }
      nlohmann::json runs = nlohmann::json::array();
      for (const auto& r : mgr_.fetch_runs(f)) runs.push_back(to_json(r));
      return {Kind::response, {}, 0, {{"runs", runs}}};
    }
    if (op == "set_speed") {
      p.object({"op", "request_id", "session", "speed"});
      const auto id = sid();
      mgr_.set_speed(id, p.at("speed").number());
      return {Kind::response, id, 0, {{"speed", p.at("speed").number()}}};
    }
    if (op == "step") {
      p.object({"op", "request_id", "session", "ticks"});
      const auto id = sid();
      const long n = p.integer("ticks", 1);
      p.check(n >= 0, "ticks must be >= 0");
      mgr_.step(id, n);
      return {Kind::response, id, 0, {{"stepped", n}}};
    }
    if (op == "end_session") {
      p.object({"op", "request_id", "session"});
      const auto id = sid();
      return {Kind::response, id, 0, {{"metrics", sim::to_json(mgr_.end_session(id))}}};
    }
    p.at("op").fail("unknown op '" + op + "'");
  }

  static void pump(Conn& c, std::shared_ptr<Subscription> sub) {
    while (c.open) {
      auto m = sub->pop(std::chrono::milliseconds(100));
      if (!m) {
        if (sub->closed()) return;
        continue;
      }
      if (!c.send(*m)) return;
    }
  }

  SessionManager& mgr_;
  Endpoint ep_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::list<std::shared_ptr<Conn>> conns_;
};

/// Blocking client. Stream frames that arrive while waiting for a response
/// are buffered and handed out by next().
class Client {
 public:
  explicit Client(const Endpoint& ep) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(ep.host.c_str(), std::to_string(ep.port).c_str(), &hints, &res) != 0 || !res)
      throw Error("cannot resolve '" + ep.host + "'");
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    const bool ok = fd_ >= 0 && ::connect(fd_, res->ai_addr, res->ai_addrlen) == 0;
    ::freeaddrinfo(res);
    if (!ok) {
      const std::string why = std::strerror(errno);
      if (fd_ >= 0) ::close(fd_);
      throw Error("cannot connect to " + ep.host + ":" + std::to_string(ep.port) + ": " + why);
    }
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  ~Client() {
    if (fd_ >= 0) ::close(fd_);
  }
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void send_raw(std::string_view bytes) {
    if (!detail::write_all(fd_, bytes)) throw Error("connection lost");
  }
  void send(const WireMessage& m) { send_raw(encode_frame(m)); }

  /// Sends a request and waits for its response. Error replies throw
  /// ServiceError carrying the server's code and path.
  nlohmann::json call(const std::string& op, nlohmann::json args = nlohmann::json::object(),
                      std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    const long rid = ++next_id_;
    args["op"] = op;
    args["request_id"] = rid;
    send(WireMessage{Kind::request, {}, 0, args});
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      auto m = read_one(std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                                              std::chrono::steady_clock::now()));
      if (!m) throw Error("no response to '" + op + "'");
      const bool mine = m->payload.contains("request_id") && m->payload["request_id"] == rid;
      if (mine && m->kind == Kind::error)
        throw ServiceError(m->payload.at("code").get<std::string>(), m->payload.at("message").get<std::string>(),
                           m->payload.value("path", std::string{}));
      if (mine && m->kind == Kind::response) return m->payload;
      buffered_.push_back(std::move(*m));
    }
  }

  /// Next pushed frame (state, event, metrics, or an unsolicited error).
  std::optional<WireMessage> next(std::chrono::milliseconds timeout) {
    if (!buffered_.empty()) {
      auto m = std::move(buffered_.front());
      buffered_.pop_front();
      return m;
    }
    return read_one(timeout);
  }

 private:
  std::optional<WireMessage> read_one(std::chrono::milliseconds timeout) {
    if (timeout.count() < 0) timeout = std::chrono::milliseconds(0);
    if (!detail::wait_readable(fd_, timeout)) return std::nullopt;
    auto body = detail::read_frame(fd_);
    if (!body) throw Error("connection closed by server");
    return message_from_json(parse_json(*body));
  }

  int fd_ = -1;
  long next_id_ = 0;
  std::deque<WireMessage> buffered_;
};

}  // namespace mscr::service
