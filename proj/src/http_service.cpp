#include "fatgate/http_service.hpp"

#include <array>
#include <atomic>
#include <cctype>
#include <list>
#include <optional>

#include <sys/socket.h>
#include <sys/time.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>

namespace fatgate {

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) {
    throw Error(ErrorCode::MalformedInput, "port out of range: " + std::to_string(port));
  }
  if (max_body_bytes == 0) throw Error(ErrorCode::MalformedInput, "max body bytes must be positive");
}

int http_status(ErrorCode code) {
  switch (wire_code(code)) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::NoMatch:
    case ErrorCode::Ambiguous:
    case ErrorCode::BadIndex:
    case ErrorCode::MalformedInput: return 400;
    default: return 500;
  }
}

// ---- CommandQueue -----------------------------------------------------------

CommandQueue::CommandQueue() : worker_([this] { run(); }) {}

CommandQueue::~CommandQueue() { shutdown(); }

std::future<Response> CommandQueue::submit(std::function<Response()> command) {
  std::packaged_task<Response()> task(std::move(command));
  auto result = task.get_future();
  {
    std::lock_guard lock(mutex_);
    if (stopping_) {
      std::promise<Response> refused;
      refused.set_value(Response::error(ErrorCode::Internal, "service is shutting down"));
      return refused.get_future();
    }
    pending_.push_back(std::move(task));
  }
  ready_.notify_one();
  return result;
}

void CommandQueue::shutdown() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  ready_.notify_all();
  if (worker_.joinable() && worker_.get_id() != std::this_thread::get_id()) worker_.join();
}

void CommandQueue::run() {
  for (;;) {
    std::packaged_task<Response()> task;
    {
      std::unique_lock lock(mutex_);
      ready_.wait(lock, [this] { return stopping_ || !pending_.empty(); });
      if (pending_.empty()) return;
      task = std::move(pending_.front());
      pending_.pop_front();
    }
    task();
  }
}

// ---- Service ----------------------------------------------------------------

namespace {

namespace beast = boost::beast;
namespace http = boost::beast::http;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

using HttpRequest = http::request<http::string_body>;
using HttpResponse = http::response<http::string_body>;

constexpr int kIdleTimeoutSeconds = 30;
constexpr std::size_t kDrainCap = 64u << 20;

HttpResponse json_response(unsigned version, bool keep_alive, int status, std::string body) {
  HttpResponse res{static_cast<http::status>(status), version};
  res.set(http::field::server, "fatgate");
  res.set(http::field::content_type, "application/json");
  res.keep_alive(keep_alive);
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

std::string error_json(ErrorCode code, const std::string& message) {
  return Response::error(code, message).to_json();
}

/// Path part of a request target, percent-decoded. nullopt if malformed.
std::optional<std::string> decode_path(std::string_view target) {
  target = target.substr(0, target.find('?'));
  std::string out;
  out.reserve(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] != '%') {
      out += target[i];
      continue;
    }
    if (i + 2 >= target.size() || !std::isxdigit(static_cast<unsigned char>(target[i + 1])) ||
        !std::isxdigit(static_cast<unsigned char>(target[i + 2]))) {
      return std::nullopt;
    }
    out += static_cast<char>(std::stoi(std::string(target.substr(i + 1, 2)), nullptr, 16));
    i += 2;
  }
  return out;
}

void set_receive_timeout(tcp::socket& socket, int seconds) {
  timeval tv{};
  tv.tv_sec = seconds;
  ::setsockopt(socket.native_handle(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

}  // namespace

struct Service::Impl {
  struct Session {
    tcp::socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
    explicit Session(tcp::socket s) : socket(std::move(s)) {}
  };

  Impl(Registry& r, std::size_t limit) : registry(r), max_body(limit), acceptor(io) {}

  HttpResponse handle(const HttpRequest& req) {
    unsigned version = req.version();
    bool keep_alive = req.keep_alive();
    auto method = req.method();
    if (method != http::verb::get && method != http::verb::put && method != http::verb::post) {
      auto res = json_response(version, keep_alive, 405,
                               error_json(ErrorCode::MalformedInput,
                                          "method " + std::string(req.method_string()) + " not allowed"));
      res.set(http::field::allow, "GET, PUT, POST");
      return res;
    }
    auto path = decode_path(std::string_view(req.target().data(), req.target().size()));
    if (!path) {
      return json_response(version, keep_alive, 400,
                           error_json(ErrorCode::MalformedInput, "malformed request target"));
    }
    std::optional<Value> body;
    if (!req.body().empty()) {
      try {
        body = parse(req.body());
      } catch (const std::exception& e) {
        auto r = Response::from_exception(e);
        return json_response(version, keep_alive, http_status(r.code()),
                             error_json(r.code(), r.message()));
      }
    }
    std::function<Response()> command = [this, target = std::move(*path), body = std::move(body)] {
      return registry.process(target, body);
    };
    auto result = queue.submit(std::move(command)).get();
    return json_response(version, keep_alive, result.is_ok() ? 200 : http_status(result.code()),
                         result.to_json());
  }

  void serve_connection(Session& session) {
    auto& socket = session.socket;
    set_receive_timeout(socket, kIdleTimeoutSeconds);
    beast::flat_buffer buffer;
    beast::error_code ec;
    for (;;) {
      http::request_parser<http::string_body> parser;
      parser.body_limit(max_body);
      http::read(socket, buffer, parser, ec);
      if (ec == http::error::body_limit) {
        auto res = json_response(parser.get().version(), false, 413,
                                 error_json(ErrorCode::MalformedInput,
                                            "request body exceeds " + std::to_string(max_body) + " bytes"));
        http::write(socket, res, ec);
        drain(socket);
        break;
      }
      if (ec) {
        if (ec != http::error::end_of_stream && ec != asio::error::eof &&
            ec != asio::error::connection_reset && !parser.is_header_done() && buffer.size() > 0) {
          auto res = json_response(11, false, 400, error_json(ErrorCode::MalformedInput, "bad request"));
          http::write(socket, res, ec);
        }
        break;
      }
      auto res = handle(parser.get());
      http::write(socket, res, ec);
      if (ec || !res.keep_alive()) break;
    }
    socket.shutdown(tcp::socket::shutdown_send, ec);
    session.done = true;
  }

  // Reads and discards what the client is still sending so the close does
  // not reset the connection before the error response is delivered.
  static void drain(tcp::socket& socket) {
    beast::error_code ec;
    socket.shutdown(tcp::socket::shutdown_send, ec);
    set_receive_timeout(socket, 1);
    std::array<char, 16384> scratch{};
    std::size_t total = 0;
    while (total < kDrainCap) {
      std::size_t n = socket.read_some(asio::buffer(scratch), ec);
      if (ec) break;
      total += n;
    }
  }

  void accept_next() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      reap();
      auto session = std::make_shared<Session>(std::move(socket));
      {
        std::lock_guard lock(sessions_mutex);
        sessions.push_back(session);
      }
      session->thread = std::thread([this, session] { serve_connection(*session); });
      accept_next();
    });
  }

  void reap() {
    std::lock_guard lock(sessions_mutex);
    for (auto it = sessions.begin(); it != sessions.end();) {
      if ((*it)->done) {
        (*it)->thread.join();
        it = sessions.erase(it);
      } else {
        ++it;
      }
    }
  }

  Registry& registry;
  std::size_t max_body;
  asio::io_context io;
  tcp::acceptor acceptor;
  CommandQueue queue;
  std::thread listener;
  std::mutex sessions_mutex;
  std::list<std::shared_ptr<Session>> sessions;
  std::mutex stop_mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
  bool finished = false;
};

std::unique_ptr<Service> Service::serve(const ServiceConfig& config, Registry& registry) {
  config.validate();
  auto impl = std::make_unique<Impl>(registry, config.max_body_bytes);
  auto& acceptor = impl->acceptor;
  try {
    tcp::endpoint endpoint(asio::ip::make_address(config.host), static_cast<unsigned short>(config.port));
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Internal,
                "cannot bind " + config.host + ":" + std::to_string(config.port) + ": " + e.what());
  }
  int port = acceptor.local_endpoint().port();
  Impl* raw = impl.get();
  raw->accept_next();
  raw->listener = std::thread([raw] { raw->io.run(); });

  std::unique_ptr<Service> service(new Service(std::move(impl)));
  service->host_ = config.host;
  service->port_ = port;
  return service;
}

Service::Service(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}

Service::~Service() { shutdown(); }

void Service::shutdown() {
  {
    std::lock_guard lock(impl_->stop_mutex);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  Impl& impl = *impl_;
  asio::post(impl.io, [&impl] {
    beast::error_code ec;
    impl.acceptor.close(ec);
  });
  if (impl.listener.joinable()) impl.listener.join();
  // in-flight and already queued commands run to completion
  impl.queue.shutdown();
  {
    std::lock_guard lock(impl.sessions_mutex);
    for (auto& s : impl.sessions) {
      // wakes sessions idling in read; pending responses can still be written
      ::shutdown(s->socket.native_handle(), SHUT_RD);
    }
  }
  {
    std::lock_guard lock(impl.sessions_mutex);
    for (auto& s : impl.sessions) {
      if (s->thread.joinable()) s->thread.join();
    }
    impl.sessions.clear();
  }
  {
    std::lock_guard lock(impl.stop_mutex);
    impl.finished = true;
  }
  impl.stopped_cv.notify_all();
}

void Service::wait() {
  std::unique_lock lock(impl_->stop_mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->finished; });
}

}  // namespace fatgate
