// Regenerates the protocol transcripts under tests/golden. Run from anywhere:
//   make_golden <golden-dir>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "aamcm/protocol.hpp"

using json = nlohmann::ordered_json;

namespace {

struct Recorder {
  aamcm::protocol::Session session;
  std::ofstream out;

  json send(const std::string& req) {
    const auto resp = session.handle_line(req);
    out << "> " << req << "\n< " << resp << "\n";
    return json::parse(resp);
  }
};

// Cycles through every action code across aircraft and steps.
json actions_for(const json& obs, int step) {
  json a = json::object();
  int k = step;
  for (const auto& [id, v] : obs.items()) a[id] = (k++) % 7;
  return a;
}

void session_t3(Recorder& r) {
  r.send(R"({"op":"hello","id":1})");
  r.send(R"({"op":"step","actions":{},"id":2})");
  auto resp = r.send(R"({"op":"reset","seed":17,"scenario":"small_t3.cfg","id":3})");
  json obs = resp["observations"];
  for (int i = 0; i < 24; ++i) {
    json req = {{"op", "step"}, {"actions", actions_for(obs, i)}, {"id", 4 + i}};
    resp = r.send(req.dump());
    obs = resp["observations"];
  }
  r.send(R"({"op":"close","id":99})");
}

void session_t5(Recorder& r) {
  r.send(R"({"op":"reset","seed":5,"scenario":"small_t5.cfg","curriculum":"T5"})");
  for (int i = 0; i < 20; ++i) r.send(R"({"op":"step"})");
  r.send(R"({"op":"step","actions":{"0":6,"1":6,"2":6}})");
  for (int i = 0; i < 4; ++i) r.send(R"({"op":"step"})");
  r.send(R"({"op":"close"})");
}

void session_errors(Recorder& r) {
  r.send("{oops");
  r.send("[]");
  r.send(R"({"id":"x"})");
  r.send(R"({"op":"launch","id":"y"})");
  r.send(R"({"op":"reset","seed":-1})");
  r.send(R"({"op":"reset","seed":3,"curriculum":"T0"})");
  r.send(R"({"op":"reset","seed":3,"scenario":"missing.cfg"})");
  r.send(R"({"op":"step"})");
  r.send(R"({"op":"reset","seed":3,"scenario":"small_t3.cfg"})");
  r.send(R"({"op":"step","actions":{"12345":1}})");
  r.send(R"({"op":"step","actions":{"0":7}})");
  r.send(R"({"op":"step","actions":{"a":1}})");
  r.send(R"({"op":"step","actions":{"0":"left"}})");
  r.send(R"({"op":"step","actions":[1,2]})");
  r.send(R"({"op":"step"})");
  r.send(R"({"op":"close"})");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_golden <golden-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::current_path(dir);
  const std::vector<std::pair<std::string, std::function<void(Recorder&)>>> sessions = {
      {"session_t3.txt", session_t3}, {"session_t5.txt", session_t5}, {"errors.txt", session_errors}};
  for (const auto& [name, fn] : sessions) {
    Recorder r;
    r.out.open(name, std::ios::binary);
    fn(r);
    std::cout << "wrote " << (dir / name).string() << "\n";
  }
  return 0;
}
