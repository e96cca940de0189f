#pragma once

// REST front end over a Registry.
//
// GET, PUT and POST are interchangeable: an empty body reads, a non-empty
// body (JSON) writes or calls. Commands run one at a time, in arrival
// order, on a dedicated executor thread; connection threads wait for their
// command's result, so the listener keeps accepting while a long command
// runs.

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "fatgate/registry.hpp"

namespace fatgate {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  /// 0 binds an ephemeral port; see Service::port().
  int port = 8080;
  std::size_t max_body_bytes = 1'048'576;

  /// Throws Error(MalformedInput) for an out-of-range port or a zero body
  /// limit.
  void validate() const;
};

int http_status(ErrorCode code);

/// FIFO command queue drained by a single worker thread.
class CommandQueue {
 public:
  CommandQueue();
  ~CommandQueue();
  CommandQueue(const CommandQueue&) = delete;
  CommandQueue& operator=(const CommandQueue&) = delete;

  std::future<Response> submit(std::function<Response()> command);
  /// Runs everything already queued, then stops the worker. Idempotent.
  void shutdown();

 private:
  void run();

  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<std::packaged_task<Response()>> pending_;
  bool stopping_ = false;
  std::thread worker_;
};

class Service {
 public:
  /// Binds and starts listening. Throws Error(Internal) if the address
  /// cannot be bound. `registry` must outlive the service.
  static std::unique_ptr<Service> serve(const ServiceConfig& config, Registry& registry);

  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  int port() const noexcept { return port_; }
  const std::string& host() const noexcept { return host_; }

  /// Closes the listener, lets in-flight commands finish, then returns.
  /// Safe to call more than once.
  void shutdown();

  /// Blocks until shutdown() is called from another thread.
  void wait();

 private:
  struct Impl;
  explicit Service(std::unique_ptr<Impl> impl);

  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_ = 0;
};

}  // namespace fatgate
