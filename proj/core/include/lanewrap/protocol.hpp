#pragma once

#include <string>
#include <vector>

#include "lanewrap/predictors.hpp"

namespace lanewrap::protocol {

inline constexpr int kVersion = 1;

/// The handshake line a predictor process must print first.
std::string ready_line();
bool is_ready_line(const std::string& line);

struct Request {
  std::string scene_id;
  std::vector<PredictorRequest> frames;
};

struct Response {
  std::string scene_id;
  std::vector<PredictorResponse> frames;
};

// Single-line JSON encodings (no trailing newline).
std::string encode_request(const std::string& scene_id, const std::vector<PredictorRequest>& frames);
std::string encode_response(const std::string& scene_id, const std::vector<PredictorResponse>& frames);

/// Both decoders throw ProtocolError on anything that is not a well-formed
/// message of the expected type. Embedded scenes are parsed but not
/// validated, since Frenet-projected lanes may legitimately bunch up.
Request decode_request(const std::string& line);
Response decode_response(const std::string& line);

}  // namespace lanewrap::protocol
