#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "lanewrap/predictors.hpp"

namespace lanewrap {

/// Client for a predictor running as a child process that speaks the
/// newline-delimited JSON protocol over stdin/stdout (see protocol.hpp).
///
/// The child is started through `/bin/sh -c <command>` and must print the
/// ready line first. Requests on one instance are serialized; use one
/// instance per worker. SIGPIPE is ignored process-wide once an instance
/// has been created so that a dying child surfaces as a ProtocolError.
class ExternalPredictor final : public Predictor {
 public:
  explicit ExternalPredictor(std::string command,
                             std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~ExternalPredictor() override;

  ExternalPredictor(const ExternalPredictor&) = delete;
  ExternalPredictor& operator=(const ExternalPredictor&) = delete;

  std::vector<PredictorResponse> predict(const std::string& scene_id,
                                         const std::vector<PredictorRequest>& frames) override;

  /// Everything the child has written to stderr so far.
  std::string child_stderr() const;

 private:
  class Process;
  std::unique_ptr<Process> proc_;
  std::chrono::milliseconds timeout_;
};

/// Sends one batched request to `predictor` and validates the response.
std::vector<PredictorResponse> predict_external(ExternalPredictor& predictor, const std::string& scene_id,
                                                const std::vector<PredictorRequest>& frames);

}  // namespace lanewrap
