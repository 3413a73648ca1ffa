#include <gtest/gtest.h>

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include "teleop/transport/socket.hpp"

extern char** environ;

using namespace teleop;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

class Child {
 public:
  Child(std::vector<std::string> argv, const fs::path& log) {
    std::vector<char*> args;
    for (auto& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_addopen(&fa, 1, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_adddup2(&fa, 1, 2);
    if (posix_spawn(&pid_, args[0], &fa, nullptr, args.data(), environ) != 0) pid_ = -1;
    posix_spawn_file_actions_destroy(&fa);
  }
  ~Child() {
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }
  bool started() const { return pid_ > 0; }
  /// Exit status after SIGTERM, or -1 if it did not exit within `limit`.
  int terminate(std::chrono::milliseconds limit = 10s) {
    kill(pid_, SIGTERM);
    return wait(limit);
  }
  int wait(std::chrono::milliseconds limit) {
    const auto end = std::chrono::steady_clock::now() + limit;
    while (std::chrono::steady_clock::now() < end) {
      int st = 0;
      if (waitpid(pid_, &st, WNOHANG) == pid_) {
        pid_ = -1;
        return WIFEXITED(st) ? WEXITSTATUS(st) : 128 + WTERMSIG(st);
      }
      std::this_thread::sleep_for(20ms);
    }
    return -1;
  }

 private:
  pid_t pid_ = -1;
};

std::uint16_t free_port() {
  transport::Listener l(transport::Endpoint::parse("127.0.0.1:0"));
  return l.port();
}

std::unique_ptr<transport::EnvelopeConnection> connect_retry(std::uint16_t port, std::chrono::milliseconds limit) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    try {
      return std::make_unique<transport::EnvelopeConnection>(transport::connect_tcp({"127.0.0.1", port}, 500ms));
    } catch (const transport::NetworkError&) {
      std::this_thread::sleep_for(100ms);
    }
  }
  return nullptr;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  const auto d = fs::temp_directory_path() / "teleop_process_test";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Processes, RobotServiceConsoleAndCleanShutdown) {
  const auto dir = work_dir();
  const auto media = free_port(), control = free_port(), console = free_port();
  const auto metrics = dir / "metrics.csv";
  fs::remove(metrics);
  fs::remove(metrics.string() + ".counters");

  Child robot({ROBOT_SIM_BIN, "--host", "127.0.0.1", "--media-port", std::to_string(media), "--control-port",
               std::to_string(control), "--fps", "8"},
              dir / "robot.log");
  ASSERT_TRUE(robot.started());
  Child svc({INFERENCE_SERVICE_BIN, "--robot", "127.0.0.1:" + std::to_string(media), "--robot-control",
             "127.0.0.1:" + std::to_string(control), "--listen",
             "127.0.0.1:" + std::to_string(console), "--http-listen", "127.0.0.1:0", "--metrics", metrics.string()},
            dir / "service.log");
  ASSERT_TRUE(svc.started());

  auto conn = connect_retry(console, 20s);
  ASSERT_TRUE(conn) << slurp(dir / "service.log");
  int frames = 0;
  const auto end = std::chrono::steady_clock::now() + 60s;
  while (frames < 3 && std::chrono::steady_clock::now() < end) {
    auto r = conn->receive(500ms);
    if (r && r->message.type() == transport::MessageType::kVideoFrame) ++frames;
  }
  EXPECT_EQ(frames, 3) << slurp(dir / "service.log");

  EXPECT_EQ(svc.terminate(), 0) << slurp(dir / "service.log");
  EXPECT_EQ(robot.terminate(), 0) << slurp(dir / "robot.log");
  ASSERT_TRUE(fs::exists(metrics));
  const auto csv = slurp(metrics);
  EXPECT_EQ(csv.rfind("stage,count,p50_ms,p95_ms\n", 0), 0u);
  EXPECT_NE(csv.find("end_to_end,"), std::string::npos);
  EXPECT_NE(slurp(metrics.string() + ".counters").find("frames_out,"), std::string::npos);
}

TEST(Processes, BadArgumentsFailFast) {
  const auto dir = work_dir();
  Child bad_model({INFERENCE_SERVICE_BIN, "--config", (dir / "nope.conf").string()}, dir / "bad1.log");
  EXPECT_NE(bad_model.wait(20s), 0);
  Child bad_flag({ROBOT_SIM_BIN, "--encoding", "jpeg"}, dir / "bad2.log");
  EXPECT_NE(bad_flag.wait(20s), 0);
  Child bad_scene({ROBOT_SIM_BIN, "--scene", (dir / "missing.scene").string()}, dir / "bad3.log");
  EXPECT_NE(bad_scene.wait(20s), 0);
  EXPECT_NE(slurp(dir / "bad3.log").find("missing.scene"), std::string::npos);
}

TEST(Processes, LinkReplayRoundTrip) {
  const auto dir = work_dir();
  const auto file = dir / "link.bin";
  Child make({TELEOP_CLI_BIN, "make-link-replay", "--out", file.string(), "--samples", "120"}, dir / "make.log");
  ASSERT_EQ(make.wait(30s), 0) << slurp(dir / "make.log");
  Child replay({TELEOP_CLI_BIN, "replay-link", file.string()}, dir / "replay.csv");
  ASSERT_EQ(replay.wait(30s), 0);
  std::istringstream csv(slurp(dir / "replay.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "seq,pitch,yaw,pan,tilt");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    double v[5];
    char comma;
    std::istringstream row(line);
    row >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4];
    ASSERT_TRUE(row) << line;
    EXPECT_LE(std::abs(v[3]), 90.0);
    EXPECT_LE(std::abs(v[4]), 45.0);
  }
  EXPECT_GT(rows, 100);  // calibration consumes the first few samples
}
