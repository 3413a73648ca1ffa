#include <gtest/gtest.h>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <thread>

#include "teleop/robot/server.hpp"
#include "teleop/service/console_gateway.hpp"
#include "teleop/service/mission.hpp"
#include "teleop/service/service.hpp"

using namespace teleop;
using namespace teleop::service;
using namespace std::chrono_literals;
namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::uint16_t closed_port() {
  transport::Listener l(transport::Endpoint::parse("127.0.0.1:0"));
  return l.port();
}

ServiceConfig local_config(std::uint16_t media, std::uint16_t control, const fs::path& dir) {
  ServiceConfig cfg;
  cfg.robot = "127.0.0.1:" + std::to_string(media);
  cfg.robot_control = "127.0.0.1:" + std::to_string(control);
  cfg.listen = "127.0.0.1:0";
  cfg.http_listen = "127.0.0.1:0";
  cfg.metrics_path = (dir / "metrics.csv").string();
  return cfg;
}

std::vector<std::uint8_t> control_envelope(transport::Control c, std::uint32_t seq) {
  return transport::encode_envelope(transport::Message{0, seq, 0, c});
}

struct HttpReply {
  unsigned status = 0;
  std::string body;
  std::string content_type;
};

HttpReply http_get(std::uint16_t port, const std::string& target) {
  net::io_context ioc;
  beast::tcp_stream stream(ioc);
  stream.connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
  beast::http::request<beast::http::empty_body> req{beast::http::verb::get, target, 11};
  req.set(beast::http::field::host, "127.0.0.1");
  beast::http::write(stream, req);
  beast::flat_buffer buf;
  beast::http::response<beast::http::string_body> res;
  beast::http::read(stream, buf, res);
  beast::error_code ec;
  stream.socket().shutdown(tcp::socket::shutdown_both, ec);
  return {res.result_int(), res.body(), std::string(res[beast::http::field::content_type])};
}

/// Reads envelopes until `pred` holds or the deadline passes.
template <typename Pred>
bool wait_for_message(transport::EnvelopeConnection& c, std::chrono::milliseconds limit, Pred pred) {
  const auto end = std::chrono::steady_clock::now() + limit;
  while (std::chrono::steady_clock::now() < end) {
    auto r = c.receive(200ms);
    if (r && pred(r->message)) return true;
  }
  return false;
}

bool has_status(const transport::Message& m, const std::function<bool(const transport::RobotStatus&)>& f) {
  if (m.type() != transport::MessageType::kHeartbeat) return false;
  const auto& hb = std::get<transport::Heartbeat>(m.body);
  return hb.status && f(*hb.status);
}

}  // namespace

TEST(StaticPaths, ResolveRejectsEscapes) {
  EXPECT_EQ(resolve_static_path("/srv/ui", "/"), "/srv/ui/index.html");
  EXPECT_EQ(resolve_static_path("/srv/ui", "/app.js"), "/srv/ui/app.js");
  EXPECT_EQ(resolve_static_path("/srv/ui", "/css/site.css?v=3"), "/srv/ui/css/site.css");
  for (const char* bad : {"/../etc/passwd", "/a/../../x", "relative", "/a\\..\\b", ""})
    EXPECT_EQ(resolve_static_path("/srv/ui", bad), "") << bad;
  // Targets are not percent-decoded, so an encoded dot-dot is just a name under the root.
  EXPECT_EQ(resolve_static_path("/srv/ui", "/%2e%2e/x").rfind("/srv/ui/", 0), 0u);
  EXPECT_EQ(mime_type("index.html"), "text/html; charset=utf-8");
  EXPECT_EQ(mime_type("x.js"), "text/javascript; charset=utf-8");
  EXPECT_EQ(mime_type("blob"), "application/octet-stream");
}

TEST(Service, RobotAbsentKeepsRetrying) {
  const auto dir = temp_dir("teleop_it_absent");
  const auto port = closed_port();
  auto cfg = local_config(port, port, dir);
  cfg.http_listen.clear();
  InferenceService svc(cfg);
  svc.start();
  EXPECT_EQ(svc.http_port(), 0);

  transport::EnvelopeConnection console(transport::connect_tcp({"127.0.0.1", svc.console_port()}));
  // The service keeps its own 1 Hz heartbeat going with no robot behind it.
  EXPECT_TRUE(wait_for_message(console, 3s, [](const transport::Message& m) {
    return m.type() == transport::MessageType::kHeartbeat && !std::get<transport::Heartbeat>(m.body).status;
  }));
  EXPECT_FALSE(svc.robot_connected());
  EXPECT_FALSE(svc.relay_to_robot(control_envelope({transport::ControlCommand::kEStop, {}, 0, 0}, 1)));
  std::this_thread::sleep_for(1500ms);
  EXPECT_GE(svc.metrics().snapshot().counters.robot_reconnects, 1u);

  const auto t0 = std::chrono::steady_clock::now();
  svc.stop();
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 5s);  // backoff sleep is interruptible
  EXPECT_TRUE(fs::exists(cfg.metrics_path));
  EXPECT_TRUE(fs::exists(cfg.metrics_path + ".counters"));
}

class Loop : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = temp_dir("teleop_it_loop");
    fs::create_directories(dir_ / "ui");
    std::ofstream(dir_ / "ui" / "index.html") << "<html>console</html>";
    std::ofstream(dir_ / "secret.txt") << "keep out";

    robot::RobotServerOptions ro;
    ro.media = {"127.0.0.1", 0};
    ro.control = {"127.0.0.1", 0};
    ro.fps = 8;
    robot_ = std::make_unique<robot::RobotServer>(robot::Simulator(default_mission(1).scene, {}, ro.fps), ro);
    robot_->start();

    auto cfg = local_config(robot_->media_port(), robot_->control_port(), dir_);
    cfg.serve_console = (dir_ / "ui").string();
    svc_ = std::make_unique<InferenceService>(cfg);
    svc_->start();
  }
  void TearDown() override {
    svc_->stop();
    robot_->stop();
  }
  fs::path dir_;
  std::unique_ptr<robot::RobotServer> robot_;
  std::unique_ptr<InferenceService> svc_;
};

TEST_F(Loop, TcpConsoleSeesAnnotatedStreamAndControlsRobot) {
  transport::EnvelopeConnection console(transport::connect_tcp({"127.0.0.1", svc_->console_port()}));
  std::set<std::uint32_t> video_seqs, annotated_seqs;
  int red = 0;
  const auto matched = [&] {
    return std::count_if(annotated_seqs.begin(), annotated_seqs.end(),
                         [&](std::uint32_t s) { return video_seqs.count(s) > 0; });
  };
  const auto end = std::chrono::steady_clock::now() + 60s;
  while ((video_seqs.size() < 5 || matched() < 5) && std::chrono::steady_clock::now() < end) {
    auto r = console.receive(500ms);
    if (!r) continue;
    const auto& m = r->message;
    if (m.type() == transport::MessageType::kVideoFrame) {
      EXPECT_EQ(m.flags & transport::kFlagSbs, transport::kFlagSbs);
      const auto& vf = std::get<transport::VideoFrame>(m.body);
      EXPECT_EQ(vf.width, 1900);
      EXPECT_EQ(vf.height, 1000);
      video_seqs.insert(m.sequence);
    } else if (m.type() == transport::MessageType::kDetections) {
      const auto& d = std::get<transport::Detections>(m.body);
      // May arrive before its frame when the writer is backed up; matched by sequence.
      annotated_seqs.insert(d.frame_seq);
      for (const auto& item : d.items) red += item.verdict == transport::WireVerdict::kRed;
    }
  }
  EXPECT_GE(video_seqs.size(), 5u);
  EXPECT_GE(matched(), 5);
  EXPECT_GT(red, 0);  // the default scene holds two armed people

  console.send(control_envelope({transport::ControlCommand::kModeSwitch, transport::RobotMode::kUav, 0, 0}, 1));
  EXPECT_TRUE(wait_for_message(console, 10s, [](const transport::Message& m) {
    return has_status(m, [](const auto& s) { return s.mode == transport::RobotMode::kUav; });
  }));
  EXPECT_EQ(robot_->status().mode, transport::RobotMode::kUav);

  // Only CONTROL and HEAD_POSE reach the robot.
  const auto frame = transport::encode_envelope(
      transport::Message{0, 1, 0, transport::VideoFrame{1, 1, transport::PixelFormat::kGray8, {}, {0}}});
  EXPECT_FALSE(svc_->relay_to_robot(frame));
  EXPECT_FALSE(svc_->relay_to_robot(std::vector<std::uint8_t>{1, 2, 3}));
  EXPECT_TRUE(svc_->relay_to_robot(control_envelope({transport::ControlCommand::kEStop, {}, 0, 0}, 2)));
}

TEST_F(Loop, WebSocketBridgeCarriesEnvelopesBothWays) {
  net::io_context ioc;
  beast::websocket::stream<beast::tcp_stream> ws(ioc);
  beast::get_lowest_layer(ws).connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), svc_->http_port()));
  ws.handshake("127.0.0.1", "/ws");
  ws.binary(true);

  const auto send = [&](const std::vector<std::uint8_t>& env) { ws.write(net::buffer(env)); };
  const auto read = [&]() {
    beast::flat_buffer buf;
    ws.read(buf);
    EXPECT_TRUE(ws.got_binary());
    const auto* p = static_cast<const std::uint8_t*>(buf.data().data());
    return transport::decode_envelope(std::span(p, buf.size()));
  };

  bool saw_video = false;
  for (int i = 0; i < 200 && !saw_video; ++i) saw_video = read().type() == transport::MessageType::kVideoFrame;
  EXPECT_TRUE(saw_video);

  send(control_envelope({transport::ControlCommand::kEStop, {}, 0, 0}, 1));
  bool stopped = false;
  for (int i = 0; i < 400 && !stopped; ++i)
    stopped = has_status(read(), [](const auto& s) { return s.estop; });
  EXPECT_TRUE(stopped);
  EXPECT_TRUE(robot_->status().estop);

  ws.close(beast::websocket::close_code::normal);
}

TEST_F(Loop, StaticBundleServed) {
  auto r = http_get(svc_->http_port(), "/");
  EXPECT_EQ(r.status, 200u);
  EXPECT_EQ(r.body, "<html>console</html>");
  EXPECT_EQ(r.content_type, "text/html; charset=utf-8");
  EXPECT_EQ(http_get(svc_->http_port(), "/index.html").status, 200u);
  EXPECT_EQ(http_get(svc_->http_port(), "/missing.js").status, 404u);
  EXPECT_EQ(http_get(svc_->http_port(), "/../secret.txt").status, 404u);
  EXPECT_EQ(http_get(svc_->http_port(), "/%2e%2e/secret.txt").status, 404u);
}
