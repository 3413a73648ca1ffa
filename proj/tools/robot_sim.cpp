#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "teleop/robot/server.hpp"
#include "teleop/service/mission.hpp"

using namespace teleop;

int main(int argc, char** argv) {
  CLI::App app{"Simulated robot: renders the scene and serves VIDEO_FRAME / CONTROL over TCP"};
  std::string scene_path;
  std::uint64_t seed = 1;
  std::uint16_t media_port = 7701, control_port = 7702;
  std::string host;
  double fps = robot::kDefaultFps;
  std::string encoding = "rle";
  app.add_option("--scene", scene_path, "scene file (default: the built-in three-person scene)");
  app.add_option("--seed", seed, "seed for the built-in scene and background noise");
  app.add_option("--host", host, "bind address (default any)");
  app.add_option("--media-port", media_port);
  app.add_option("--control-port", control_port);
  app.add_option("--fps", fps)->check(CLI::Range(1.0, 240.0));
  app.add_option("--encoding", encoding)->check(CLI::IsMember({"raw", "rle"}));
  CLI11_PARSE(app, argc, argv);

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  try {
    robot::Scene scene;
    if (scene_path.empty()) {
      scene = service::default_mission(seed).scene;
    } else {
      scene = robot::load_scene(scene_path);
      if (app.count("--seed")) scene.seed = seed;
    }
    robot::RobotServerOptions opts;
    opts.media = {host, media_port};
    opts.control = {host, control_port};
    opts.fps = fps;
    opts.encoding = encoding == "raw" ? transport::FrameEncoding::kRaw : transport::FrameEncoding::kRle;
    robot::RobotServer server(robot::Simulator(scene, {}, fps), opts);
    server.start();
    std::cerr << "robot-sim: media " << server.media_port() << ", control " << server.control_port() << ", "
              << scene.entities.size() << " entities\n";
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    const auto st = server.stats();
    std::cerr << "robot-sim: " << st.frames << " frames, " << st.controls << " controls, " << st.head_poses
              << " head poses\n";
  } catch (const std::exception& e) {
    std::cerr << "robot-sim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
