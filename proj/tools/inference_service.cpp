#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "teleop/service/service.hpp"

using namespace teleop;

int main(int argc, char** argv) {
  CLI::App app{"Inference server: robot video in, annotated half-SBS video and detections out"};
  std::string config_path, robot, robot_control, listen, detector, classifier, serve_console, http_listen, metrics;
  double threshold = -1;
  app.add_option("--config", config_path, "key = value file; command-line flags override it");
  app.add_option("--robot", robot, "robot media endpoint host:port");
  app.add_option("--robot-control", robot_control, "robot control endpoint (default: media port + 1)");
  app.add_option("--listen", listen, "console envelope feed host:port");
  app.add_option("--http-listen", http_listen, "console HTTP / WebSocket host:port");
  app.add_option("--serve-console", serve_console, "directory served as the operator console");
  app.add_option("--detector", detector)->check(CLI::IsMember({"haar", "hog"}));
  app.add_option("--classifier", classifier)->check(CLI::IsMember({"reference", "stub"}));
  app.add_option("--threshold", threshold)->check(CLI::Range(0.0, 1.0));
  app.add_option("--metrics", metrics, "metrics CSV written on shutdown");
  CLI11_PARSE(app, argc, argv);

  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::signal(SIGPIPE, SIG_IGN);

  try {
    service::ServiceConfig cfg;
    if (!config_path.empty()) service::apply_config_file(cfg, config_path);
    auto set_if = [&](const char* key, const std::string& v) {
      if (!v.empty()) service::set_config_value(cfg, key, v);
    };
    set_if("robot", robot);
    set_if("robot_control", robot_control);
    set_if("listen", listen);
    set_if("http_listen", http_listen);
    set_if("serve_console", serve_console);
    set_if("detector", detector);
    set_if("classifier", classifier);
    set_if("metrics", metrics);
    if (threshold >= 0) service::set_config_value(cfg, "threshold", std::to_string(threshold));
    cfg.pipeline.validate();

    service::InferenceService svc(cfg);
    svc.start();
    std::cerr << "inference-service: robot " << cfg.robot << ", console " << svc.console_port() << ", http "
              << svc.http_port() << ", detector " << service::to_string(cfg.pipeline.detector) << "\n";
    int sig = 0;
    sigwait(&set, &sig);
    svc.stop();
    std::cerr << "inference-service: stopped, metrics in " << cfg.metrics_path << "\n";
  } catch (const std::exception& e) {
    std::cerr << "inference-service: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
