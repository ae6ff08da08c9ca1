#include "lanewrap/external_predictor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <thread>

#include "lanewrap/error.hpp"
#include "lanewrap/protocol.hpp"

namespace lanewrap {

namespace {

constexpr std::size_t kMaxStderr = 64 * 1024;

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

class ExternalPredictor::Process {
 public:
  explicit Process(const std::string& command) {
    static const bool sigpipe_ignored = [] {
      ::signal(SIGPIPE, SIG_IGN);
      return true;
    }();
    (void)sigpipe_ignored;

    int in[2], out[2], err[2];
    if (::pipe2(in, O_CLOEXEC) != 0 || ::pipe2(out, O_CLOEXEC) != 0 || ::pipe2(err, O_CLOEXEC) != 0) {
      throw PredictorError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) throw PredictorError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      ::dup2(in[0], STDIN_FILENO);
      ::dup2(out[1], STDOUT_FILENO);
      ::dup2(err[1], STDERR_FILENO);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(in[0]);
    ::close(out[1]);
    ::close(err[1]);
    stdin_ = in[1];
    stdout_ = out[0];
    stderr_fd_ = err[0];
  }

  ~Process() {
    close_fd(stdin_);
    if (pid_ > 0 && !reaped_) {
      for (int i = 0; i < 50; ++i) {
        if (try_reap()) break;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      if (!reaped_) {
        ::kill(pid_, SIGKILL);
        int status = 0;
        ::waitpid(pid_, &status, 0);
      }
    }
    close_fd(stdout_);
    close_fd(stderr_fd_);
  }

  void write_line(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::write(stdin_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("cannot write to predictor: ") + std::strerror(errno) + exit_note(),
                            stderr_buf_);
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string read_line(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto pos = stdout_buf_.find('\n'); pos != std::string::npos) {
        std::string line = stdout_buf_.substr(0, pos);
        stdout_buf_.erase(0, pos + 1);
        return line;
      }
      if (stdout_ < 0) {
        drain_stderr_blocking();
        throw ProtocolError("predictor closed its output" + exit_note(), stderr_buf_);
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) {
        throw ProtocolError("predictor timed out after " + std::to_string(timeout.count()) + " ms", stderr_buf_);
      }
      pollfd fds[2] = {{stdout_, POLLIN, 0}, {stderr_fd_, POLLIN, 0}};
      const nfds_t nfds = stderr_fd_ >= 0 ? 2 : 1;
      const int rc = ::poll(fds, nfds, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw PredictorError(std::string("poll: ") + std::strerror(errno));
      }
      if (nfds == 2 && (fds[1].revents & (POLLIN | POLLHUP))) read_stderr_chunk();
      if (fds[0].revents & (POLLIN | POLLHUP)) {
        char buf[65536];
        const ssize_t n = ::read(stdout_, buf, sizeof buf);
        if (n > 0) {
          stdout_buf_.append(buf, static_cast<std::size_t>(n));
        } else if (n == 0) {
          close_fd(stdout_);
        } else if (errno != EINTR) {
          close_fd(stdout_);
        }
      }
    }
  }

  const std::string& stderr_text() const { return stderr_buf_; }

 private:
  bool try_reap() {
    if (reaped_) return true;
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      reaped_ = true;
      exit_status_ = status;
    }
    return reaped_;
  }

  std::string exit_note() {
    for (int i = 0; i < 20 && !try_reap(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    if (!reaped_) return "";
    if (WIFEXITED(exit_status_)) return " (exit status " + std::to_string(WEXITSTATUS(exit_status_)) + ")";
    if (WIFSIGNALED(exit_status_)) return " (killed by signal " + std::to_string(WTERMSIG(exit_status_)) + ")";
    return "";
  }

  void read_stderr_chunk() {
    char buf[4096];
    const ssize_t n = ::read(stderr_fd_, buf, sizeof buf);
    if (n > 0) {
      if (stderr_buf_.size() < kMaxStderr) stderr_buf_.append(buf, static_cast<std::size_t>(n));
    } else if (n == 0 || errno != EINTR) {
      close_fd(stderr_fd_);
    }
  }

  void drain_stderr_blocking() {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(200);
    while (stderr_fd_ >= 0 && std::chrono::steady_clock::now() < deadline) {
      pollfd fd{stderr_fd_, POLLIN, 0};
      if (::poll(&fd, 1, 50) <= 0) break;
      read_stderr_chunk();
    }
  }

  pid_t pid_ = -1;
  int stdin_ = -1;
  int stdout_ = -1;
  int stderr_fd_ = -1;
  bool reaped_ = false;
  int exit_status_ = 0;
  std::string stdout_buf_;
  std::string stderr_buf_;
};

ExternalPredictor::ExternalPredictor(std::string command, std::chrono::milliseconds timeout)
    : proc_(std::make_unique<Process>(command)), timeout_(timeout) {
  const std::string first = proc_->read_line(timeout_);
  if (!protocol::is_ready_line(first)) {
    throw ProtocolError("predictor handshake failed: expected ready line, got '" + first.substr(0, 200) + "'",
                        proc_->stderr_text());
  }
}

ExternalPredictor::~ExternalPredictor() = default;

std::vector<PredictorResponse> ExternalPredictor::predict(const std::string& scene_id,
                                                          const std::vector<PredictorRequest>& frames) {
  proc_->write_line(protocol::encode_request(scene_id, frames));
  const std::string line = proc_->read_line(timeout_);
  protocol::Response resp;
  try {
    resp = protocol::decode_response(line);
  } catch (const ProtocolError& e) {
    throw ProtocolError(e.what(), proc_->stderr_text());
  }
  if (resp.scene_id != scene_id) {
    throw ProtocolError("response scene_id '" + resp.scene_id + "' does not match request '" + scene_id + "'",
                        proc_->stderr_text());
  }
  if (resp.frames.size() != frames.size()) {
    throw ProtocolError("response carries " + std::to_string(resp.frames.size()) + " frames, expected " +
                            std::to_string(frames.size()),
                        proc_->stderr_text());
  }
  std::vector<PredictorResponse> ordered;
  ordered.reserve(frames.size());
  for (const auto& f : frames) {
    auto it = std::find_if(resp.frames.begin(), resp.frames.end(),
                           [&](const PredictorResponse& r) { return r.frame_index == f.frame_index; });
    if (it == resp.frames.end()) {
      throw ProtocolError("response lacks frame_index " + std::to_string(f.frame_index), proc_->stderr_text());
    }
    ordered.push_back(std::move(*it));
  }
  return ordered;
}

std::string ExternalPredictor::child_stderr() const { return proc_->stderr_text(); }

std::vector<PredictorResponse> predict_external(ExternalPredictor& predictor, const std::string& scene_id,
                                                const std::vector<PredictorRequest>& frames) {
  auto responses = predictor.predict(scene_id, frames);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    validate_response(frames[i], responses[i], frames[i].scene.future_steps);
  }
  return responses;
}

}  // namespace lanewrap
