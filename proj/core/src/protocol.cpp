#include "lanewrap/protocol.hpp"

#include "json_internal.hpp"
#include "lanewrap/error.hpp"

namespace lanewrap::protocol {

using nlohmann::json;

std::string ready_line() { return nlohmann::ordered_json{{"type", "ready"}, {"protocol", kVersion}}.dump(); }

bool is_ready_line(const std::string& line) {
  try {
    const auto j = json::parse(line);
    return j.is_object() && j.value("type", "") == "ready" && j.contains("protocol") &&
           j["protocol"].is_number_integer() && j["protocol"].get<int>() == kVersion;
  } catch (const json::exception&) {
    return false;
  }
}

std::string encode_request(const std::string& scene_id, const std::vector<PredictorRequest>& frames) {
  json j;
  j["type"] = "predict";
  j["scene_id"] = scene_id;
  json fr = json::array();
  for (const auto& f : frames) {
    fr.push_back({{"frame_index", f.frame_index}, {"k", f.k}, {"scene", detail::scene_to_json(f.scene)}});
  }
  j["frames"] = std::move(fr);
  return j.dump();
}

std::string encode_response(const std::string& scene_id, const std::vector<PredictorResponse>& frames) {
  json j;
  j["type"] = "prediction";
  j["scene_id"] = scene_id;
  json fr = json::array();
  for (const auto& f : frames) {
    json trajs = json::array();
    for (const auto& t : f.trajectories) {
      json wps = json::array();
      for (const auto& p : t.waypoints) wps.push_back({p.x, p.y});
      trajs.push_back(std::move(wps));
    }
    fr.push_back({{"frame_index", f.frame_index}, {"trajectories", std::move(trajs)}, {"probs", f.conditional_probs}});
  }
  j["frames"] = std::move(fr);
  return j.dump();
}

namespace {

json parse_message(const std::string& line, const char* expected_type) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed protocol line: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ProtocolError("protocol line lacks a message type");
  }
  if (j["type"].get<std::string>() != expected_type) {
    throw ProtocolError("unexpected message type '" + j["type"].get<std::string>() + "', expected '" +
                        expected_type + "'");
  }
  if (!j.contains("scene_id") || !j.contains("frames") || !j["frames"].is_array()) {
    throw ProtocolError(std::string("'") + expected_type + "' message lacks scene_id or frames");
  }
  return j;
}

std::string id_string(const json& j) {
  return j.is_string() ? j.get<std::string>() : j.dump();
}

}  // namespace

Request decode_request(const std::string& line) {
  const json j = parse_message(line, "predict");
  Request r;
  r.scene_id = id_string(j["scene_id"]);
  try {
    for (const auto& f : j["frames"]) {
      PredictorRequest pr;
      pr.frame_index = f.at("frame_index").get<int>();
      pr.k = f.at("k").get<int>();
      pr.scene = detail::scene_from_json(f.at("scene"));
      r.frames.push_back(std::move(pr));
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed predict request: ") + e.what());
  } catch (const ParseError& e) {
    throw ProtocolError(std::string("malformed scene in predict request: ") + e.what());
  }
  return r;
}

Response decode_response(const std::string& line) {
  const json j = parse_message(line, "prediction");
  Response r;
  r.scene_id = id_string(j["scene_id"]);
  try {
    for (const auto& f : j["frames"]) {
      PredictorResponse pr;
      pr.frame_index = f.at("frame_index").get<int>();
      for (const auto& tj : f.at("trajectories")) {
        Trajectory t;
        for (const auto& p : tj) {
          if (!p.is_array() || p.size() != 2) throw ProtocolError("waypoints must be [s, d] pairs");
          t.waypoints.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        pr.trajectories.push_back(std::move(t));
      }
      pr.conditional_probs = f.at("probs").get<std::vector<double>>();
      r.frames.push_back(std::move(pr));
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed prediction response: ") + e.what());
  }
  return r;
}

}  // namespace lanewrap::protocol
