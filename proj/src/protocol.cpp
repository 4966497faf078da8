#include "aamcm/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "aamcm/error.hpp"
#include "aamcm/text.hpp"

namespace aamcm::protocol {

using nlohmann::ordered_json;

namespace {

ordered_json error_body(std::string_view code, const std::string& message) {
  ordered_json e;
  e["ok"] = false;
  e["error"] = {{"code", code}, {"message", message}};
  return e;
}

ordered_json observations_json(const std::map<int, Observation>& obs) {
  ordered_json out = ordered_json::object();
  for (const auto& [id, o] : obs) out[std::to_string(id)] = o.values;
  return out;
}

ordered_json breakdown_json(const rewards::RewardBreakdown& r) {
  ordered_json j;
  j["energy"] = r.energy;
  j["hazard"] = r.hazard;
  j["vertiport"] = r.vertiport;
  j["population"] = r.population;
  j["step"] = r.step;
  j["action"] = r.action;
  j["total"] = r.total;
  return j;
}

}  // namespace

struct Session::Impl {
  static ordered_json hello(Session& s) {
    ordered_json r;
    r["ok"] = true;
    r["protocol"] = kProtocolVersion;
    r["obs_size"] = s.env_.observation_size();
    r["num_actions"] = kActionCount;
    return r;
  }

  static ordered_json reset(Session& s, const nlohmann::json& req) {
    std::uint64_t seed = 0;
    if (req.contains("seed")) {
      if (!req["seed"].is_number_unsigned()) throw Error(Errc::BadRequest, "seed must be a non-negative integer");
      seed = req["seed"].get<std::uint64_t>();
    }
    std::optional<scenario::Curriculum> task;
    if (req.contains("curriculum") && !req["curriculum"].is_null()) {
      if (!req["curriculum"].is_string()) throw Error(Errc::BadRequest, "curriculum must be a string");
      task = scenario::parse_curriculum(req["curriculum"].get<std::string>());
    }
    scenario::ScenarioConfig cfg;
    if (req.contains("scenario") && !req["scenario"].is_null()) {
      if (!req["scenario"].is_string()) throw Error(Errc::BadRequest, "scenario must be a path string");
      cfg = scenario::load_scenario(req["scenario"].get<std::string>());
      if (task) {
        const auto preset = scenario::curriculum_preset(*task);
        cfg.curriculum = preset.curriculum;
        cfg.terms = preset.terms;
        cfg.wind_enabled = preset.wind_enabled;
      }
    } else {
      cfg = scenario::curriculum_preset(task.value_or(scenario::Curriculum::T5));
    }

    scenario::Scenario sc;
    if (s.have_cache_ && s.cached_net_path_ == cfg.network_path && s.cached_pop_path_ == cfg.population_path) {
      sc.config = cfg;
      sc.network = s.cached_net_;
      sc.population = s.cached_pop_;
    } else {
      sc = scenario::materialize(cfg);
      s.cached_net_ = sc.network;
      s.cached_pop_ = sc.population;
      s.cached_net_path_ = cfg.network_path;
      s.cached_pop_path_ = cfg.population_path;
      s.have_cache_ = true;
    }
    s.world_.reset();
    s.world_.emplace(std::move(sc), s.env_);
    const auto obs = s.world_->reset(seed);

    ordered_json r;
    r["ok"] = true;
    r["observations"] = observations_json(obs);
    r["info"] = {{"time_s", s.world_->time_s()}, {"done", s.world_->done()}};
    return r;
  }

  static ordered_json step(Session& s, const nlohmann::json& req) {
    if (!s.world_ || !s.world_->initialized()) throw Error(Errc::NotInitialized, "step before reset");
    if (s.world_->done()) throw Error(Errc::NotInitialized, "episode finished; reset required");
    std::map<int, Action> actions;
    if (req.contains("actions")) {
      const auto& a = req["actions"];
      if (!a.is_object()) throw Error(Errc::BadRequest, "actions must be an object of id -> code");
      for (const auto& [key, val] : a.items()) {
        const auto id = text::parse_int(key);
        if (!id) throw Error(Errc::BadRequest, "aircraft id '" + key + "' is not an integer");
        if (!val.is_number_integer()) throw Error(Errc::BadRequest, "action for " + key + " must be an integer");
        const auto act = action_from_code(val.get<long long>());
        if (!act) throw Error(Errc::BadRequest, "action code for " + key + " must be in 0..6");
        actions[static_cast<int>(*id)] = *act;
      }
    }
    const auto res = s.world_->step(actions);

    ordered_json r;
    r["ok"] = true;
    r["observations"] = observations_json(res.observations);
    ordered_json rewards = ordered_json::object();
    for (const auto& [id, b] : res.rewards) rewards[std::to_string(id)] = breakdown_json(b);
    r["rewards"] = rewards;
    ordered_json terms = ordered_json::object();
    for (const auto& [id, t] : res.terminals) terms[std::to_string(id)] = terminal_name(t);
    r["terminals"] = terms;
    r["info"] = {{"time_s", res.time_s}, {"done", res.done}};
    return r;
  }
};

Session::Session(EnvConfig env) : env_(env) { env_.validate(); }

std::string Session::handle_line(std::string_view line) {
  nlohmann::json req;
  ordered_json resp;
  nlohmann::json id;
  try {
    req = nlohmann::json::parse(line);
    if (!req.is_object()) throw Error(Errc::BadRequest, "request must be a JSON object");
    if (req.contains("id")) id = req["id"];
    if (!req.contains("op") || !req["op"].is_string()) throw Error(Errc::BadRequest, "missing string field 'op'");
    const auto op = req["op"].get<std::string>();
    if (op == "hello") {
      resp = Impl::hello(*this);
    } else if (op == "reset") {
      resp = Impl::reset(*this, req);
    } else if (op == "step") {
      resp = Impl::step(*this, req);
    } else if (op == "close") {
      closed_ = true;
      world_.reset();
      resp = {{"ok", true}};
    } else {
      throw Error(Errc::BadRequest, "unknown op '" + op + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    resp = error_body(errc_name(Errc::BadRequest), e.what());
  } catch (const Error& e) {
    resp = error_body(errc_name(e.code()), e.what());
  } catch (const std::exception& e) {
    resp = error_body("internal", e.what());
  }
  if (!id.is_null()) {
    ordered_json out;
    out["id"] = id;
    for (auto& [k, v] : resp.items()) out[k] = v;
    return out.dump();
  }
  return resp.dump();
}

void serve_stream(std::istream& in, std::ostream& out, const EnvConfig& env) {
  Session session(env);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out << session.handle_line(line) << '\n';
    out.flush();
  }
}

TcpServer::TcpServer(std::uint16_t port, const std::string& host, EnvConfig env) : env_(env) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(Errc::IoError, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw Error(Errc::ConfigError, "bad listen address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw Error(Errc::IoError, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  stop();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard lock(mu_);
  for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
}

void TcpServer::run() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    std::lock_guard lock(mu_);
    if (stopping_) {
      ::close(fd);
      break;
    }
    client_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpServer::serve_connection(int fd) {
  spdlog::debug("connection opened (fd {})", fd);
  Session session(env_);
  std::string buffer;
  char chunk[4096];
  bool open = true;
  while (open && !session.closed()) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    while (!session.closed() && (pos = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      std::string reply = session.handle_line(line) + "\n";
      std::size_t sent = 0;
      while (sent < reply.size()) {
        const ssize_t w = ::send(fd, reply.data() + sent, reply.size() - sent, MSG_NOSIGNAL);
        if (w <= 0) {
          open = false;
          break;
        }
        sent += static_cast<std::size_t>(w);
      }
      if (!open) break;
    }
  }
  {
    std::lock_guard lock(mu_);
    std::erase(client_fds_, fd);
  }
  ::close(fd);
  spdlog::debug("connection closed (fd {})", fd);
}

}  // namespace aamcm::protocol
