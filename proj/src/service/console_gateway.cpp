#include "teleop/service/console_gateway.hpp"

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "teleop/service/service.hpp"

namespace teleop::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

std::string mime_type(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json" || ext == ".map") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

std::string resolve_static_path(const std::string& root, const std::string& target) {
  if (root.empty() || target.empty() || target[0] != '/') return {};
  std::string path = target.substr(0, target.find_first_of("?#"));
  if (path.find("..") != std::string::npos || path.find('\\') != std::string::npos ||
      path.find('\0') != std::string::npos)
    return {};
  if (path.back() == '/') path += "index.html";
  return (std::filesystem::path(root) / path.substr(1)).string();
}

namespace {

constexpr std::size_t kMaxInflightWrites = 2;
constexpr auto kPollInterval = std::chrono::milliseconds(5);

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& s, ConsoleHub& hub) : ws_(std::move(s)), hub_(hub), timer_(ws_.get_executor()) {}
  // Only the subscription is released here: when the io_context is torn
  // down the socket's service may already be gone.
  ~WsSession() {
    if (!closed_ && sub_) hub_.unsubscribe(sub_);
  }

  void run(http::request<http::string_body> req) {
    ws_.binary(true);
    ws_.read_message_max(transport::kHeaderSize + transport::kMaxPayload + transport::kTrailerSize);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    sub_ = hub_.subscribe();
    do_read();
    poll();
  }

  void do_read() { ws_.async_read(buf_, beast::bind_front_handler(&WsSession::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return close();
    const auto data = buf_.cdata();
    std::vector<std::uint8_t> bytes(static_cast<const std::uint8_t*>(data.data()),
                                    static_cast<const std::uint8_t*>(data.data()) + data.size());
    buf_.consume(buf_.size());
    hub_.relay_to_robot(bytes);
    do_read();
  }

  // Moves envelopes from the subscription to the socket, a few at a time so a
  // slow browser leaves frames in the latest-wins queue rather than here.
  void poll() {
    if (closed_) return;
    while (outq_.size() < kMaxInflightWrites) {
      auto item = sub_->channel.try_pop();
      if (!item) break;
      outq_.push_back(std::move(item->bytes));
      if (outq_.size() == 1) do_write();
    }
    timer_.expires_after(kPollInterval);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->poll();
    });
  }

  void do_write() {
    ws_.async_write(net::buffer(outq_.front()), beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return close();
    outq_.pop_front();
    if (!outq_.empty()) do_write();
  }

  void close() {
    if (closed_) return;
    closed_ = true;
    if (sub_) hub_.unsubscribe(sub_);
    beast::error_code ignored;
    timer_.cancel();
    beast::get_lowest_layer(ws_).socket().close(ignored);
  }

  websocket::stream<beast::tcp_stream> ws_;
  ConsoleHub& hub_;
  net::steady_timer timer_;
  beast::flat_buffer buf_;
  std::shared_ptr<ConsoleSubscription> sub_;
  std::deque<std::vector<std::uint8_t>> outq_;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& s, ConsoleHub& hub, const std::string& root) : stream_(std::move(s)), hub_(hub), root_(root) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buf_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

 private:
  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        std::make_shared<WsSession>(stream_.release_socket(), hub_)->run(std::move(req_));
        return;
      }
      return respond(http::status::not_found, "text/plain", "no websocket endpoint here\n");
    }
    if (req_.method() != http::verb::get && req_.method() != http::verb::head)
      return respond(http::status::method_not_allowed, "text/plain", "GET only\n");
    const std::string path = resolve_static_path(root_, std::string(req_.target()));
    if (path.empty()) return respond(http::status::not_found, "text/plain", "not found\n");
    std::ifstream in(path, std::ios::binary);
    if (!in) return respond(http::status::not_found, "text/plain", "not found\n");
    std::ostringstream body;
    body << in.rdbuf();
    respond(http::status::ok, mime_type(path), body.str());
  }

  void respond(http::status status, const std::string& type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::server, "inference-service");
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    const bool head = req_.method() == http::verb::head;
    res->body() = head ? std::string() : std::move(body);
    res->prepare_payload();
    if (head) res->content_length(0);
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  beast::tcp_stream stream_;
  ConsoleHub& hub_;
  const std::string& root_;
  beast::flat_buffer buf_;
  http::request<http::string_body> req_;
};

}  // namespace

struct ConsoleGateway::Impl {
  Impl(ConsoleHub& h, const transport::Endpoint& ep, std::string dir)
      : hub(h), root(std::move(dir)), acceptor(ioc) {
    const auto addr = ep.host.empty() ? net::ip::address_v4::any() : net::ip::make_address(ep.host);
    const tcp::endpoint endpoint(addr, ep.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
  }

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (ec) return;
      std::make_shared<HttpSession>(std::move(s), hub, root)->run();
      do_accept();
    });
  }

  ConsoleHub& hub;
  std::string root;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  std::thread thread;
};

ConsoleGateway::ConsoleGateway(ConsoleHub& hub, const transport::Endpoint& listen, std::string static_dir) {
  try {
    impl_ = std::make_unique<Impl>(hub, listen, std::move(static_dir));
  } catch (const boost::system::system_error& e) {
    throw transport::NetworkError("console gateway " + listen.to_string() + ": " + e.what());
  }
}

ConsoleGateway::~ConsoleGateway() { stop(); }

void ConsoleGateway::start() {
  if (impl_->thread.joinable()) return;
  impl_->do_accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void ConsoleGateway::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  // Destroying the pending handlers releases the sessions, which unsubscribe.
  impl_.reset();
}

std::uint16_t ConsoleGateway::port() const { return impl_ ? impl_->acceptor.local_endpoint().port() : 0; }

}  // namespace teleop::service
