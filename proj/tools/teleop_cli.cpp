#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "teleop/overlay/ppm.hpp"
#include "teleop/robot/render.hpp"
#include "teleop/service/mission.hpp"
#include "teleop/service/pipeline.hpp"
#include "teleop/telemetry/filter.hpp"
#include "teleop/telemetry/head_pose.hpp"
#include "teleop/telemetry/link_frame.hpp"
#include "teleop/training/datasets.hpp"
#include "teleop/transport/gaps.hpp"
#include "teleop/transport/socket.hpp"

using namespace teleop;
using nlohmann::json;

namespace {

// Reference classifier recipe: default-jitter crops plus a wider-jitter set so
// the model tolerates loose detector boxes.
int train_classifier(const std::string& out, int epochs, double lr, double l2) {
  auto train = robot::labeled_corpus(1, 4000);
  const auto wide = robot::labeled_corpus(3, 6000, {0.15, 0.2});
  train.insert(train.end(), wide.begin(), wide.end());
  const auto test = robot::labeled_corpus(2, 1000);
  const auto a = training::corpus_features(train), b = training::corpus_features(test);
  training::SgdOptions o;
  o.epochs = epochs;
  o.learning_rate = lr;
  o.l2 = l2;
  const auto m = training::fit_softmax(a.x, a.y, threat::kNumClasses, o);
  std::cout << "train accuracy " << training::softmax_accuracy(m, a.x, a.y) << ", held-out accuracy "
            << training::softmax_accuracy(m, b.x, b.y) << "\n";
  std::ofstream f(out);
  threat::write_reference_model(f, m);
  if (!f) throw Error("cannot write " + out);
  return 0;
}

int train_svm(const std::string& out, int epochs, double lr, double l2) {
  const vision::HogParams hp;
  const vision::GaussianKernelParams blur;
  const auto train = training::person_windows(11, 1500, 4500, hp, blur);
  const auto test = training::person_windows(12, 300, 900, hp, blur);
  training::SgdOptions o;
  o.epochs = epochs;
  o.learning_rate = lr;
  o.l2 = l2;
  const auto m = training::fit_linear_svm(train.x, train.y, o);
  auto acc = [&](const training::LabeledSet& s) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) ok += vision::svm_positive(vision::svm_score(s.x[i], m), m) == (s.y[i] > 0);
    return static_cast<double>(ok) / s.x.size();
  };
  std::cout << "train accuracy " << acc(train) << ", held-out accuracy " << acc(test) << "\n";
  std::ofstream f(out);
  vision::write_svm(f, m);
  if (!f) throw Error("cannot write " + out);
  return 0;
}

service::Pipeline make_pipeline(const std::string& detector, const std::string& classifier) {
  service::PipelineConfig cfg;
  cfg.detector = service::parse_detector_kind(detector);
  cfg.classifier = service::parse_classifier_kind(classifier);
  return service::Pipeline(cfg, service::PipelineModels::load(cfg));
}

int mission(std::uint64_t seed, std::uint32_t frames, const std::string& detector, const std::string& dump_dir) {
  const auto script = service::default_mission(seed, frames);
  const auto pipeline = make_pipeline(detector, "reference");
  if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);
  const auto rep = service::run_mission(script, pipeline, [&](std::uint32_t f, const vision::RgbImage& sbs) {
    if (dump_dir.empty()) return;
    std::ostringstream name;
    name << dump_dir << "/sbs_" << std::setw(4) << std::setfill('0') << f << ".ppm";
    overlay::write_ppm(name.str(), sbs);
  });
  std::size_t armed = 0, unarmed = 0;
  for (const auto& o : rep.outcomes) (o.armed ? armed : unarmed)++;
  json j = {{"frames", rep.frames},
            {"stream_digest", rep.stream_digest},
            {"sprite_frames", rep.outcomes.size()},
            {"armed_sprite_frames", armed},
            {"unarmed_sprite_frames", unarmed},
            {"armed_red_rate", rep.verdict_rate(true)},
            {"unarmed_green_rate", rep.verdict_rate(false)},
            {"bbox_contains_centroid_rate", rep.detection_rate()},
            {"detections", rep.counters.detections},
            {"classifier_calls", rep.counters.classifier_calls},
            {"classifier_failures", rep.counters.classifier_failures}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int bench(std::uint32_t frames, const std::string& detector) {
  const auto pipeline = make_pipeline(detector, "reference");
  const auto script = service::default_mission(7, frames);
  service::StopWatch w;
  const auto rep = service::run_mission(script, pipeline);
  const double s = w.ms() / 1000.0;
  std::cout << "detector " << detector << ": " << frames << " frames in " << s << " s (" << frames / s
            << " fps including simulation and wire coding)\n";
  std::cout << "stage,count,p50_ms,p95_ms\n";
  for (std::size_t i = 0; i < service::kStageCount; ++i)
    std::cout << service::kStageNames[i] << "," << rep.stages[i].count << "," << rep.stages[i].p50_ms << ","
              << rep.stages[i].p95_ms << "\n";
  return 0;
}

// Synthetic IMU stream for a head turning right, then left, then nodding.
std::vector<telemetry::ImuSample> synthetic_imu(std::size_t n) {
  std::vector<telemetry::ImuSample> out;
  const double field = 40.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i / telemetry::kSampleRateHz;
    const double yaw = i < 20 ? 0.0 : 40.0 * std::sin(0.8 * (t - 0.4));
    const double pitch = i < 20 ? 0.0 : 15.0 * std::sin(0.5 * (t - 0.4));
    const double p = pitch * M_PI / 180, y = yaw * M_PI / 180;
    out.push_back({{-std::sin(p), 0.0, std::cos(p)}, {field * std::cos(y), -field * std::sin(y), -20.0},
                   static_cast<std::uint64_t>(t * 1e6)});
  }
  return out;
}

int make_link_replay(const std::string& out, std::size_t samples) {
  telemetry::HeadTracker tracker;
  std::vector<std::vector<std::uint8_t>> payloads;
  std::uint32_t seq = 0;
  for (const auto& s : synthetic_imu(samples))
    if (const auto pose = tracker.push(s)) payloads.push_back(telemetry::head_pose_payload(*pose, ++seq));
  telemetry::write_link_replay(out, payloads);
  std::cout << payloads.size() << " head-pose frames written to " << out << "\n";
  return 0;
}

int replay_link(const std::string& path) {
  std::cout << "seq,pitch,yaw,pan,tilt\n";
  for (const auto& payload : telemetry::read_link_replay(path)) {
    const auto m = telemetry::parse_head_pose(payload);
    const auto cmd = telemetry::pose_to_pan_tilt(m.pose, m.seq);
    std::cout << m.seq << "," << m.pose.pitch << "," << m.pose.yaw << "," << cmd.pan << "," << cmd.tilt << "\n";
  }
  return 0;
}

int render(std::uint64_t seed, const std::string& scene_path, double pan, double tilt, bool uav,
           const std::string& out) {
  const auto scene = scene_path.empty() ? service::default_mission(seed).scene : robot::load_scene(scene_path);
  robot::CameraState cam;
  cam.pan = pan;
  cam.tilt = tilt;
  cam.mode = uav ? robot::RobotMode::kUav : robot::RobotMode::kUgv;
  overlay::write_ppm(out, robot::render_frame(scene, cam));
  return 0;
}

struct ConsoleOptions {
  std::string connect = "127.0.0.1:7703";
  double seconds = 5.0;
  std::size_t max_frames = 0;
  std::string snapshot;
  std::vector<std::string> send;  // estop, release, ugv, uav, drive:L:R, look:YAW:PITCH
};

transport::Message command_message(const std::string& spec, std::uint32_t seq, std::uint32_t pose_seq) {
  transport::Message m;
  m.sequence = seq;
  transport::Control c;
  if (spec == "estop") {
    c.command = transport::ControlCommand::kEStop;
  } else if (spec == "release") {
    c.command = transport::ControlCommand::kEStopRelease;
  } else if (spec == "ugv" || spec == "uav") {
    c.command = transport::ControlCommand::kModeSwitch;
    c.mode = spec == "uav" ? transport::RobotMode::kUav : transport::RobotMode::kUgv;
  } else if (spec.rfind("drive:", 0) == 0) {
    int l = 0, r = 0;
    if (std::sscanf(spec.c_str(), "drive:%d:%d", &l, &r) != 2 || std::abs(l) > 127 || std::abs(r) > 127)
      throw InvalidParameter("drive takes drive:L:R with L, R in [-127, 127]");
    c.command = transport::ControlCommand::kDrive;
    c.left = static_cast<std::int8_t>(l);
    c.right = static_cast<std::int8_t>(r);
  } else if (spec.rfind("look:", 0) == 0) {
    double yaw = 0, pitch = 0;
    if (std::sscanf(spec.c_str(), "look:%lf:%lf", &yaw, &pitch) != 2)
      throw InvalidParameter("look takes look:YAW:PITCH in degrees");
    m.body = transport::HeadPoseRelay{telemetry::encode_link_frame(telemetry::head_pose_payload({pitch, yaw, 0}, pose_seq))};
    return m;
  } else {
    throw InvalidParameter("unknown command '" + spec + "'");
  }
  m.body = c;
  return m;
}

// Headless operator console: subscribes to the envelope feed, optionally sends
// commands, and prints what arrived as JSON.
int console(const ConsoleOptions& opt) {
  transport::EnvelopeConnection conn(transport::connect_tcp(transport::Endpoint::parse(opt.connect)));
  transport::Sequencer seq;
  std::uint32_t pose_seq = 0;
  for (const auto& s : opt.send) {
    auto m = command_message(s, 0, ++pose_seq);
    m.sequence = seq.next(m.type());
    conn.send(m);
  }
  std::map<transport::MessageType, transport::GapDetector> gaps;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t sbs_frames = 0, detections = 0, red = 0, green = 0, unknown = 0;
  std::optional<transport::RobotStatus> status;
  std::optional<transport::VideoFrame> last;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(opt.seconds);
  while (std::chrono::steady_clock::now() < deadline && (opt.max_frames == 0 || sbs_frames < opt.max_frames)) {
    const auto got = conn.receive(std::chrono::milliseconds(100));
    if (!got) continue;
    const auto& m = got->message;
    gaps[m.type()].observe(m.sequence);
    if (const auto* v = std::get_if<transport::VideoFrame>(&m.body)) {
      ++counts["video_frame"];
      if (m.flags & transport::kFlagSbs) ++sbs_frames;
      last = *v;
    } else if (const auto* d = std::get_if<transport::Detections>(&m.body)) {
      ++counts["detections"];
      detections += d->items.size();
      for (const auto& it : d->items)
        (it.verdict == transport::WireVerdict::kRed ? red : it.verdict == transport::WireVerdict::kGreen ? green : unknown)++;
    } else if (const auto* h = std::get_if<transport::Heartbeat>(&m.body)) {
      ++counts["heartbeat"];
      if (h->status) status = h->status;
    }
  }
  if (!opt.snapshot.empty() && last) overlay::write_ppm(opt.snapshot, service::image_of(*last));
  std::uint64_t lost = 0;
  for (const auto& [t, g] : gaps) lost += g.total_lost();
  json j = {{"messages", counts},   {"sbs_frames", sbs_frames}, {"detection_records", detections},
            {"red", red},           {"green", green},           {"unknown", unknown},
            {"sequence_lost", lost}};
  if (last) j["frame"] = {{"width", last->width}, {"height", last->height}};
  if (status)
    j["robot"] = {{"mode", status->mode == transport::RobotMode::kUav ? "uav" : "ugv"},
                  {"estop", status->estop},
                  {"pan_deg", status->pan_cdeg / 100.0},
                  {"tilt_deg", status->tilt_cdeg / 100.0},
                  {"frame", status->frame_index}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teleoperation pipeline tools"};
  app.require_subcommand(1);

  std::string out;
  int epochs = 30;
  double lr = 0.5, l2 = 1e-4;
  auto* tc = app.add_subcommand("train-classifier", "fit the reference threat classifier on the synthetic corpus");
  tc->add_option("--out", out, "model file")->required();
  tc->add_option("--epochs", epochs);
  tc->add_option("--lr", lr);
  tc->add_option("--l2", l2);

  int svm_epochs = 20;
  double svm_lr = 0.1, svm_l2 = 1e-4;
  auto* ts = app.add_subcommand("train-svm", "fit the HOG person detector SVM");
  ts->add_option("--out", out, "model file")->required();
  ts->add_option("--epochs", svm_epochs);
  ts->add_option("--lr", svm_lr);
  ts->add_option("--l2", svm_l2);

  std::uint64_t seed = 1;
  std::uint32_t frames = 100;
  std::string detector = "haar", dump_dir;
  auto* mi = app.add_subcommand("mission", "run the scripted mission in-process and score it");
  mi->add_option("--seed", seed);
  mi->add_option("--frames", frames);
  mi->add_option("--detector", detector)->check(CLI::IsMember({"haar", "hog"}));
  mi->add_option("--dump-dir", dump_dir, "write each SBS frame as PPM here");

  std::uint32_t bench_frames = 60;
  auto* be = app.add_subcommand("bench", "per-stage latency on simulated frames");
  be->add_option("--frames", bench_frames);
  be->add_option("--detector", detector)->check(CLI::IsMember({"haar", "hog"}));

  std::size_t samples = 500;
  auto* ml = app.add_subcommand("make-link-replay", "synthesize a head-tracking link replay file");
  ml->add_option("--out", out)->required();
  ml->add_option("--samples", samples, "IMU samples at 50 Hz");

  std::string in;
  auto* rl = app.add_subcommand("replay-link", "decode a link replay file into pan/tilt commands");
  rl->add_option("file", in)->required();

  std::string scene_path;
  double pan = 0, tilt = 0;
  bool uav = false;
  auto* re = app.add_subcommand("render", "render one camera frame to PPM");
  re->add_option("--seed", seed);
  re->add_option("--scene", scene_path);
  re->add_option("--pan", pan);
  re->add_option("--tilt", tilt);
  re->add_flag("--uav", uav);
  re->add_option("--out", out)->required();

  ConsoleOptions copt;
  auto* co = app.add_subcommand("console", "headless console client for the inference service");
  co->add_option("--connect", copt.connect);
  co->add_option("--seconds", copt.seconds);
  co->add_option("--frames", copt.max_frames, "stop after this many SBS frames");
  co->add_option("--snapshot", copt.snapshot, "write the last SBS frame as PPM");
  co->add_option("--send", copt.send, "estop | release | ugv | uav | drive:L:R | look:YAW:PITCH");

  CLI11_PARSE(app, argc, argv);
  std::signal(SIGPIPE, SIG_IGN);
  try {
    if (*tc) return train_classifier(out, epochs, lr, l2);
    if (*ts) return train_svm(out, svm_epochs, svm_lr, svm_l2);
    if (*mi) return mission(seed, frames, detector, dump_dir);
    if (*be) return bench(bench_frames, detector);
    if (*ml) return make_link_replay(out, samples);
    if (*rl) return replay_link(in);
    if (*re) return render(seed, scene_path, pan, tilt, uav, out);
    if (*co) return console(copt);
  } catch (const std::exception& e) {
    std::cerr << "teleop-cli: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
