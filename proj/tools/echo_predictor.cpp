// Loopback predictor speaking the line protocol on stdin/stdout. Answers
// every frame with the constant-acceleration baseline. The --fault flag
// injects protocol violations for conformance tests.
#include <chrono>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "lanewrap/error.hpp"
#include "lanewrap/predictors.hpp"
#include "lanewrap/protocol.hpp"

namespace {

using lanewrap::PredictorResponse;
namespace protocol = lanewrap::protocol;

void apply_fault(const std::string& fault, std::vector<PredictorResponse>& frames) {
  for (auto& f : frames) {
    if (fault == "short" && !f.trajectories.empty()) {
      f.trajectories.pop_back();
      f.conditional_probs.pop_back();
    } else if (fault == "badprob") {
      for (auto& p : f.conditional_probs) p *= 0.8;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-acceleration predictor over the line protocol"};
  std::string fault = "none";
  app.add_option("--fault", fault, "Injected failure")
      ->check(CLI::IsMember({"none", "short", "badprob", "nohandshake", "garbage", "exit", "slow"}));
  double slow_seconds = 5.0;
  app.add_option("--slow-seconds", slow_seconds, "Delay per request with --fault slow");
  CLI11_PARSE(app, argc, argv);

  std::ios::sync_with_stdio(false);
  if (fault == "nohandshake") {
    std::cerr << "echo_predictor: refusing handshake\n";
    std::cout << "hello" << std::endl;
    return 0;
  }
  std::cout << protocol::ready_line() << std::endl;

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    if (fault == "exit") {
      std::cerr << "echo_predictor: exiting on request\n";
      return 3;
    }
    if (fault == "garbage") {
      std::cout << "{not json" << std::endl;
      continue;
    }
    if (fault == "slow") std::this_thread::sleep_for(std::chrono::duration<double>(slow_seconds));
    try {
      const auto req = protocol::decode_request(line);
      std::vector<PredictorResponse> frames;
      frames.reserve(req.frames.size());
      for (const auto& f : req.frames) {
        auto r = lanewrap::predict_ca(f.scene, f.k);
        r.frame_index = f.frame_index;
        frames.push_back(std::move(r));
      }
      apply_fault(fault, frames);
      std::cout << protocol::encode_response(req.scene_id, frames) << std::endl;
    } catch (const lanewrap::Error& e) {
      std::cerr << "echo_predictor: " << e.what() << "\n";
      return 2;
    }
  }
  return 0;
}
