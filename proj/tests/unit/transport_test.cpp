#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "message_gen.hpp"
#include "oracles.hpp"
#include "teleop/transport/channel.hpp"
#include "teleop/transport/crc32.hpp"
#include "teleop/transport/envelope.hpp"
#include "teleop/transport/gaps.hpp"
#include "teleop/transport/socket.hpp"

using namespace teleop;
using namespace teleop::transport;
using namespace std::chrono_literals;
using gen::kAllTypes;
using gen::random_message;

namespace {

std::vector<std::uint8_t> bytes_of(std::string_view s) { return {s.begin(), s.end()}; }

ProtocolError decode_error(std::span<const std::uint8_t> bytes) {
  try {
    decode_envelope(bytes);
  } catch (const ProtocolError& e) {
    return e;
  }
  ADD_FAILURE() << "decode succeeded";
  return {ProtocolErrorKind::kMalformedPayload, 0, ""};
}

OutboundItem media(std::uint32_t seq) { return {MessageType::kVideoFrame, seq, {}}; }
OutboundItem control(std::uint32_t seq) { return {MessageType::kControl, seq, {}}; }

}  // namespace

TEST(Crc32, CheckVector) {
  const auto v = bytes_of("123456789");
  EXPECT_EQ(crc32(v), 0xCBF43926u);
  EXPECT_EQ(oracle::crc32(v), 0xCBF43926u);
  EXPECT_EQ(crc32({}), 0u);
}

TEST(Crc32, MatchesBitwiseOracle) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint8_t> v(rng() % 300);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng());
    ASSERT_EQ(crc32(v), oracle::crc32(v));
    const std::size_t cut = v.empty() ? 0 : rng() % v.size();
    ASSERT_EQ(crc32_update(crc32(std::span(v).first(cut)), std::span(v).subspan(cut)), crc32(v));
  }
}

TEST(Envelope, HeaderLayout) {
  Message m{0, 0x01020304, 0x1122334455667788ull, Control{ControlCommand::kEStop, RobotMode::kUgv, 0, 0}};
  const auto b = encode_envelope(m);
  ASSERT_GE(b.size(), kHeaderSize + kTrailerSize);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "TSP1");
  EXPECT_EQ(b[4], 0x03);
  EXPECT_EQ(b[5], 0x00);
  EXPECT_EQ((std::vector<std::uint8_t>(b.begin() + 6, b.begin() + 10)), (std::vector<std::uint8_t>{1, 2, 3, 4}));
  EXPECT_EQ(b[10], 0x11);
  EXPECT_EQ(b[17], 0x88);
  const std::uint32_t len = (b[18] << 24) | (b[19] << 16) | (b[20] << 8) | b[21];
  EXPECT_EQ(len, b.size() - kHeaderSize - kTrailerSize);
  const std::uint32_t crc = (b[b.size() - 4] << 24) | (b[b.size() - 3] << 16) | (b[b.size() - 2] << 8) | b.back();
  EXPECT_EQ(crc, oracle::crc32(std::span(b).subspan(4, b.size() - 8)));
}

TEST(Envelope, RoundTripEachType) {
  std::mt19937_64 rng(10);
  for (auto t : kAllTypes)
    for (int i = 0; i < 50; ++i) {
      const auto m = random_message(rng, t);
      ASSERT_EQ(decode_envelope(encode_envelope(m)), m) << static_cast<int>(t);
    }
}

TEST(Envelope, FuzzEveryTypeWithBitFlips) {
  std::mt19937_64 rng(11);
  for (auto t : kAllTypes)
    for (int i = 0; i < 10000; ++i) {
      const auto m = random_message(rng, t);
      auto b = encode_envelope(m);
      ASSERT_EQ(decode_envelope(b), m);
      const std::size_t bit = rng() % (b.size() * 8);
      b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ASSERT_THROW(decode_envelope(b), ProtocolError) << "flip at bit " << bit;
    }
}

TEST(Envelope, DistinctErrorKinds) {
  const Message m{0, 1, 2, Control{ControlCommand::kDrive, RobotMode::kUgv, 10, -10}};
  const auto good = encode_envelope(m);

  auto b = good;
  b[0] = 'X';
  auto e = decode_error(b);
  EXPECT_EQ(e.kind(), ProtocolErrorKind::kBadMagic);
  EXPECT_EQ(e.offset(), 0u);

  b = good;
  b.back() ^= 0x01;
  e = decode_error(b);
  EXPECT_EQ(e.kind(), ProtocolErrorKind::kCrcMismatch);
  EXPECT_EQ(e.offset(), good.size() - 4);

  b = good;
  b.pop_back();
  EXPECT_EQ(decode_error(b).kind(), ProtocolErrorKind::kTruncated);
  EXPECT_EQ(decode_error(std::span(good).first(10)).kind(), ProtocolErrorKind::kTruncated);

  b = good;
  b.push_back(0);
  EXPECT_EQ(decode_error(b).kind(), ProtocolErrorKind::kTrailingBytes);

  const std::vector<std::uint8_t> payload{0x03};
  auto unknown = encode_envelope(0x09, 0, 1, 0, payload);
  e = decode_error(unknown);
  EXPECT_EQ(e.kind(), ProtocolErrorKind::kUnknownType);
  EXPECT_EQ(e.offset(), 4u);

  auto too_big = good;
  too_big[18] = 0x7F;
  EXPECT_EQ(decode_error(too_big).kind(), ProtocolErrorKind::kPayloadTooLarge);

  const std::vector<std::uint8_t> bad_cmd{0x42};
  e = decode_error(encode_envelope(0x03, 0, 1, 0, bad_cmd));
  EXPECT_EQ(e.kind(), ProtocolErrorKind::kMalformedPayload);
  EXPECT_GE(e.offset(), kHeaderSize);
}

TEST(Envelope, RleRoundTripAndErrors) {
  std::vector<std::uint8_t> px(3 * 600, 7);
  px[5] = 9;
  const auto enc = rle_encode(px, 3);
  EXPECT_LT(enc.size(), px.size() / 10);
  EXPECT_EQ(rle_decode(enc, 3, 600), px);
  EXPECT_THROW(rle_decode(enc, 3, 601), ProtocolError);
  EXPECT_THROW(rle_decode(enc, 3, 599), ProtocolError);
  const std::vector<std::uint8_t> zero_run{0, 1, 2, 3};
  EXPECT_THROW(rle_decode(zero_run, 3, 1), ProtocolError);
}

TEST(Sequencer, PerTypeFromOne) {
  Sequencer s;
  EXPECT_EQ(s.next(MessageType::kVideoFrame), 1u);
  EXPECT_EQ(s.next(MessageType::kVideoFrame), 2u);
  EXPECT_EQ(s.next(MessageType::kControl), 1u);
  EXPECT_EQ(s.next(MessageType::kVideoFrame), 3u);
}

TEST(Gaps, ReportsMissingRun) {
  GapDetector g;
  for (std::uint32_t s : {1u, 2u, 5u}) g.observe(s);
  ASSERT_EQ(g.gaps().size(), 1u);
  EXPECT_EQ(g.gaps()[0], (SequenceGap{3, 5}));
  EXPECT_EQ(g.total_lost(), 2u);
}

TEST(Gaps, WrapAndReorder) {
  GapDetector g;
  g.observe(0xFFFFFFFEu);
  g.observe(0xFFFFFFFFu);
  g.observe(0u);
  EXPECT_TRUE(g.gaps().empty());
  const auto gap = g.observe(3u);
  ASSERT_TRUE(gap);
  EXPECT_EQ(gap->lost(), 2u);
  EXPECT_FALSE(g.observe(1u).has_value());
  EXPECT_EQ(g.reordered(), 1u);
  EXPECT_EQ(g.total_lost(), 2u);
}

TEST(Channel, LatestWins) {
  OutboundChannel ch(1, 16);
  EXPECT_EQ(ch.push(media(1)), PushResult::kQueued);
  EXPECT_EQ(ch.push(media(2)), PushResult::kDroppedOldest);
  const auto v = ch.try_pop();
  ASSERT_TRUE(v);
  EXPECT_EQ(v->sequence, 2u);
  EXPECT_FALSE(ch.try_pop());
  EXPECT_EQ(ch.metrics().media_dropped, 1u);
}

TEST(Channel, BurstGapsEqualDrops) {
  OutboundChannel ch(8, 16);
  GapDetector g;
  g.observe(0);  // sequences start at 1, so a leading drop shows as a gap
  for (std::uint32_t s = 1; s <= 1000; ++s) {
    ch.push(media(s));
    if (s % 10 == 0)
      if (auto v = ch.try_pop()) g.observe(v->sequence);
  }
  while (auto v = ch.try_pop()) g.observe(v->sequence);
  const auto m = ch.metrics();
  EXPECT_GT(m.media_dropped, 800u);
  EXPECT_EQ(m.media_sent + m.media_dropped, 1000u);
  EXPECT_EQ(g.received() - 1, m.media_sent);
  EXPECT_EQ(g.total_lost(), m.media_dropped);
  EXPECT_EQ(g.reordered(), 0u);
}

TEST(Channel, ControlIsLosslessAndFirst) {
  OutboundChannel ch(1, 4);
  ch.push(media(1));
  for (std::uint32_t s = 1; s <= 4; ++s) EXPECT_EQ(ch.push(control(s)), PushResult::kQueued);
  EXPECT_EQ(ch.push(control(5)), PushResult::kOverWatermark);
  ch.push(media(2));
  for (std::uint32_t s = 1; s <= 5; ++s) {
    const auto v = ch.try_pop();
    ASSERT_TRUE(v);
    EXPECT_EQ(v->type, MessageType::kControl);
    EXPECT_EQ(v->sequence, s);
  }
  EXPECT_EQ(ch.try_pop()->sequence, 2u);
  const auto m = ch.metrics();
  EXPECT_EQ(m.backpressure_faults, 1u);
  EXPECT_EQ(m.control_high_water, 5u);
}

TEST(Channel, CloseWakesPop) {
  OutboundChannel ch;
  std::thread t([&] {
    std::this_thread::sleep_for(50ms);
    ch.close();
  });
  EXPECT_FALSE(ch.pop(5s).has_value());
  t.join();
  EXPECT_EQ(ch.push(media(1)), PushResult::kClosed);
}

TEST(EnvelopeReader, SplitsArbitraryChunks) {
  std::mt19937_64 rng(12);
  std::vector<Message> sent;
  std::vector<std::uint8_t> stream;
  for (int i = 0; i < 200; ++i) {
    sent.push_back(random_message(rng, kAllTypes[rng() % 5]));
    const auto b = encode_envelope(sent.back());
    stream.insert(stream.end(), b.begin(), b.end());
  }
  EnvelopeReader r;
  std::vector<Message> got;
  for (std::size_t pos = 0; pos < stream.size();) {
    const std::size_t n = std::min<std::size_t>(1 + rng() % 40, stream.size() - pos);
    r.feed(std::span(stream).subspan(pos, n));
    pos += n;
    while (auto m = r.next()) got.push_back(*m);
  }
  EXPECT_EQ(got, sent);
  EXPECT_EQ(r.buffered(), 0u);
}

TEST(EnvelopeReader, CorruptStreamIsFatal) {
  auto b = encode_envelope(Message{0, 1, 0, Heartbeat{}});
  b[b.size() - 1] ^= 0xFF;
  EnvelopeReader r;
  r.feed(b);
  EXPECT_THROW(r.next(), ProtocolError);
  EnvelopeReader junk;
  junk.feed(bytes_of("HTTP/1.1 200 OK\r\n\r\n...................."));
  EXPECT_THROW(junk.next(), ProtocolError);
}

TEST(Endpoint, Parse) {
  const auto e = Endpoint::parse("127.0.0.1:7701");
  EXPECT_EQ(e.host, "127.0.0.1");
  EXPECT_EQ(e.port, 7701);
  EXPECT_EQ(Endpoint::parse(":80").host, "");
  EXPECT_THROW(Endpoint::parse("nohost"), Error);
  EXPECT_THROW(Endpoint::parse("a:70000"), Error);
}

TEST(Socket, LoopbackEnvelopes) {
  Listener l(Endpoint::parse("127.0.0.1:0"));
  ASSERT_NE(l.port(), 0);
  std::mt19937_64 rng(13);
  std::vector<Message> sent;
  for (int i = 0; i < 30; ++i) sent.push_back(random_message(rng, kAllTypes[i % 5]));
  std::thread client([&] {
    EnvelopeConnection c(connect_tcp({"127.0.0.1", l.port()}));
    for (const auto& m : sent) c.send(m);
  });
  auto s = l.accept(2s);
  ASSERT_TRUE(s);
  EnvelopeConnection server(std::move(*s));
  std::vector<Message> got;
  while (got.size() < sent.size()) {
    auto r = server.receive(2s);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->raw, encode_envelope(r->message));
    got.push_back(r->message);
  }
  client.join();
  EXPECT_EQ(got, sent);
  EXPECT_THROW(
      {
        while (server.receive(2s)) {
        }
      },
      NetworkError);
}

TEST(Socket, ConnectRefused) {
  std::uint16_t port;
  {
    Listener l(Endpoint::parse("127.0.0.1:0"));
    port = l.port();
  }
  EXPECT_THROW(connect_tcp({"127.0.0.1", port}, 500ms), NetworkError);
}
