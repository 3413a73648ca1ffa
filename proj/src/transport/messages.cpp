#include "teleop/transport/messages.hpp"

#include <cstring>

#include "teleop/telemetry/head_pose.hpp"
#include "teleop/telemetry/link_frame.hpp"
#include "teleop/transport/byte_io.hpp"
#include "teleop/transport/envelope.hpp"

namespace teleop::transport {

bool is_known_type(std::uint8_t t) { return t >= 0x01 && t <= 0x05; }

MessageType type_of(const Body& body) {
  return std::visit(
      [](const auto& b) -> MessageType {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, VideoFrame>) return MessageType::kVideoFrame;
        else if constexpr (std::is_same_v<T, Detections>) return MessageType::kDetections;
        else if constexpr (std::is_same_v<T, Control>) return MessageType::kControl;
        else if constexpr (std::is_same_v<T, HeadPoseRelay>) return MessageType::kHeadPose;
        else return MessageType::kHeartbeat;
      },
      body);
}

std::vector<std::uint8_t> rle_encode(std::span<const std::uint8_t> pixels, int ch) {
  std::vector<std::uint8_t> out;
  const std::size_t n = pixels.size() / ch;
  std::size_t i = 0;
  while (i < n) {
    const std::uint8_t* px = pixels.data() + i * ch;
    std::size_t run = 1;
    while (i + run < n && run < 255 && std::memcmp(px, pixels.data() + (i + run) * ch, ch) == 0) ++run;
    out.push_back(static_cast<std::uint8_t>(run));
    out.insert(out.end(), px, px + ch);
    i += run;
  }
  return out;
}

std::vector<std::uint8_t> rle_decode(std::span<const std::uint8_t> data, int ch, std::size_t pixel_count,
                                     std::size_t base_offset) {
  std::vector<std::uint8_t> out;
  out.reserve(pixel_count * ch);
  ByteReader r(data, base_offset);
  std::size_t produced = 0;
  while (r.remaining() > 0) {
    const std::uint8_t run = r.u8();
    if (run == 0) r.fail("RLE run of length 0");
    const auto px = r.bytes(ch);
    if (produced + run > pixel_count) r.fail("RLE data exceeds frame size");
    for (int k = 0; k < run; ++k) out.insert(out.end(), px.begin(), px.end());
    produced += run;
  }
  if (produced != pixel_count) r.fail("RLE data shorter than frame size");
  return out;
}

namespace {

void encode_video(ByteWriter& w, const VideoFrame& f) {
  const std::size_t expected = static_cast<std::size_t>(f.width) * f.height * channels(f.format);
  if (f.width == 0 || f.height == 0 || f.pixels.size() != expected)
    throw InvalidInput("video frame pixel buffer does not match its dimensions");
  w.u16(f.width);
  w.u16(f.height);
  w.u8(static_cast<std::uint8_t>(f.format));
  w.u8(static_cast<std::uint8_t>(f.encoding));
  if (f.encoding == FrameEncoding::kRle)
    w.bytes(rle_encode(f.pixels, channels(f.format)));
  else
    w.bytes(f.pixels);
}

VideoFrame decode_video(ByteReader& r) {
  VideoFrame f;
  f.width = r.u16();
  f.height = r.u16();
  if (f.width == 0 || f.height == 0) r.fail("video frame has zero dimension");
  const std::uint8_t fmt = r.u8();
  if (fmt != static_cast<std::uint8_t>(PixelFormat::kGray8) && fmt != static_cast<std::uint8_t>(PixelFormat::kRgb8))
    r.fail("unknown pixel format");
  f.format = static_cast<PixelFormat>(fmt);
  const std::uint8_t enc = r.u8();
  if (enc > static_cast<std::uint8_t>(FrameEncoding::kRle)) r.fail("unknown frame encoding");
  f.encoding = static_cast<FrameEncoding>(enc);
  const std::size_t pixels = static_cast<std::size_t>(f.width) * f.height;
  const std::size_t bytes = pixels * channels(f.format);
  if (bytes > kMaxPayload) r.fail("decoded frame exceeds payload cap");
  if (f.encoding == FrameEncoding::kRaw) {
    if (r.remaining() != bytes) r.fail("raw frame length does not match dimensions");
    auto b = r.bytes(bytes);
    f.pixels.assign(b.begin(), b.end());
  } else {
    const std::size_t at = r.offset();
    f.pixels = rle_decode(r.bytes(r.remaining()), channels(f.format), pixels, at);
  }
  return f;
}

void encode_detections(ByteWriter& w, const Detections& d) {
  if (d.items.size() > 0xFFFF) throw InvalidInput("too many detections for one message");
  w.u32(d.frame_seq);
  w.u16(static_cast<std::uint16_t>(d.items.size()));
  for (const auto& it : d.items) {
    w.u16(it.x);
    w.u16(it.y);
    w.u16(it.w);
    w.u16(it.h);
    w.f32(it.person_score);
    w.f32(it.threat_probability);
    w.u8(static_cast<std::uint8_t>(it.verdict));
    w.u8(it.percent);
    w.u8(it.label);
  }
}

Detections decode_detections(ByteReader& r) {
  Detections d;
  d.frame_seq = r.u32();
  const std::uint16_t n = r.u16();
  if (r.remaining() != static_cast<std::size_t>(n) * 19) r.fail("detection count does not match payload length");
  d.items.reserve(n);
  for (int i = 0; i < n; ++i) {
    DetectionRecord it;
    it.x = r.u16();
    it.y = r.u16();
    it.w = r.u16();
    it.h = r.u16();
    it.person_score = r.f32();
    it.threat_probability = r.f32();
    const std::uint8_t v = r.u8();
    if (v > static_cast<std::uint8_t>(WireVerdict::kUnknown)) r.fail("unknown verdict color");
    it.verdict = static_cast<WireVerdict>(v);
    it.percent = r.u8();
    if (it.percent > 100) r.fail("percent above 100");
    it.label = r.u8();
    if (it.label >= 8 && it.label != kUnknownLabel) r.fail("unknown class label index");
    d.items.push_back(it);
  }
  return d;
}

void encode_control(ByteWriter& w, const Control& c) {
  w.u8(static_cast<std::uint8_t>(c.command));
  switch (c.command) {
    case ControlCommand::kModeSwitch: w.u8(static_cast<std::uint8_t>(c.mode)); break;
    case ControlCommand::kDrive:
      w.i8(c.left);
      w.i8(c.right);
      break;
    case ControlCommand::kEStop:
    case ControlCommand::kEStopRelease: break;
  }
}

Control decode_control(ByteReader& r) {
  Control c;
  const std::uint8_t cmd = r.u8();
  switch (cmd) {
    case 0x01: {
      c.command = ControlCommand::kModeSwitch;
      const std::uint8_t m = r.u8();
      if (m > 1) r.fail("unknown robot mode");
      c.mode = static_cast<RobotMode>(m);
      break;
    }
    case 0x02:
      c.command = ControlCommand::kDrive;
      c.left = r.i8();
      c.right = r.i8();
      break;
    case 0x03: c.command = ControlCommand::kEStop; break;
    case 0x04: c.command = ControlCommand::kEStopRelease; break;
    default: r.fail("unknown control subcommand");
  }
  r.expect_end("control");
  return c;
}

HeadPoseRelay decode_head_pose(ByteReader& r) {
  const std::size_t at = r.offset();
  auto b = r.bytes(r.remaining());
  try {
    telemetry::parse_head_pose(telemetry::decode_link_frame(b));
  } catch (const Error& e) {
    throw ProtocolError(ProtocolErrorKind::kMalformedPayload, at, std::string("head pose: ") + e.what());
  }
  return {{b.begin(), b.end()}};
}

void encode_heartbeat(ByteWriter& w, const Heartbeat& h) {
  if (!h.status) return;
  const auto& s = *h.status;
  w.u8(0x01);
  w.u8(static_cast<std::uint8_t>(s.mode));
  w.u8(s.estop ? 1 : 0);
  w.i16(s.pan_cdeg);
  w.i16(s.tilt_cdeg);
  w.u32(s.frame_index);
  w.u32(s.last_control_seq);
}

Heartbeat decode_heartbeat(ByteReader& r) {
  Heartbeat h;
  if (r.remaining() == 0) return h;
  if (r.u8() != 0x01) r.fail("unknown heartbeat status tag");
  RobotStatus s;
  const std::uint8_t m = r.u8();
  if (m > 1) r.fail("unknown robot mode");
  s.mode = static_cast<RobotMode>(m);
  const std::uint8_t e = r.u8();
  if (e > 1) r.fail("invalid e-stop flag");
  s.estop = e == 1;
  s.pan_cdeg = r.i16();
  s.tilt_cdeg = r.i16();
  s.frame_index = r.u32();
  s.last_control_seq = r.u32();
  r.expect_end("heartbeat");
  h.status = s;
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_body(const Body& body) {
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, VideoFrame>) encode_video(w, b);
        else if constexpr (std::is_same_v<T, Detections>) encode_detections(w, b);
        else if constexpr (std::is_same_v<T, Control>) encode_control(w, b);
        else if constexpr (std::is_same_v<T, HeadPoseRelay>) w.bytes(b.link_frame);
        else encode_heartbeat(w, b);
      },
      body);
  return out;
}

Body decode_body(MessageType type, std::span<const std::uint8_t> payload, std::size_t base_offset) {
  ByteReader r(payload, base_offset);
  switch (type) {
    case MessageType::kVideoFrame: return decode_video(r);
    case MessageType::kDetections: return decode_detections(r);
    case MessageType::kControl: return decode_control(r);
    case MessageType::kHeadPose: return decode_head_pose(r);
    case MessageType::kHeartbeat: return decode_heartbeat(r);
  }
  throw ProtocolError(ProtocolErrorKind::kUnknownType, base_offset, "unknown message type");
}

}  // namespace teleop::transport
