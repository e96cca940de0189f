#include "fatgate/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "fatgate/demo_model.hpp"
#include "fatgate/http_service.hpp"
#include "fatgate/registry.hpp"
#include "fatgate/tsgen.hpp"

namespace fatgate::cli {

namespace {

constexpr int kDefaultPort = 8080;

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

int default_port() {
  if (const char* env = std::getenv("FATGATE_PORT")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      return -1;
    }
  }
  return kDefaultPort;
}

int print_response(const Response& r, std::ostream& out) {
  out << r.to_json();
  out.flush();
  return r.is_ok() ? 0 : 1;
}

int serve(const std::string& host, int port, std::ostream& err) {
  demo::Model model;
  Registry registry;
  demo::expose(registry, model);
  ServiceConfig config;
  config.host = host;
  config.port = port;
  std::unique_ptr<Service> service;
  try {
    service = Service::serve(config, registry);
  } catch (const std::exception& e) {
    err << "fatgate: " << e.what() << "\n";
    return 1;
  }
  err << "fatgate: listening on http://" << service->host() << ":" << service->port() << "\n";
  g_interrupted = false;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  service->shutdown();
  return 0;
}

int emit_ts(const std::string& path, std::ostream& err) {
  demo::Model model;
  Registry registry;
  demo::expose(registry, model);
  std::string source = tsgen::emit(tsgen::make_plan(registry));
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    err << "fatgate: cannot open '" << path << "' for writing\n";
    return 1;
  }
  file << source;
  file.close();
  if (!file) {
    err << "fatgate: failed writing '" << path << "'\n";
    return 1;
  }
  return 0;
}

int call(const std::string& path, const std::optional<std::string>& body_text, std::ostream& out) {
  demo::Model model;
  Registry registry;
  demo::expose(registry, model);
  std::optional<Value> body;
  if (body_text && !body_text->empty()) {
    try {
      body = parse(*body_text);
    } catch (const std::exception& e) {
      return print_response(Response::from_exception(e), out);
    }
  }
  return print_response(registry.process(path, std::move(body)), out);
}

int introspect(const std::string& path, const std::string& meta, std::ostream& out) {
  demo::Model model;
  Registry registry;
  demo::expose(registry, model);
  std::string target = path;
  if (target.empty() || target.back() != '/') target += '/';
  target += "@" + meta;
  return print_response(registry.process(target), out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fat API gateway over a reflected object tree", "fatgate"};
  app.require_subcommand(1);

  std::string host = "127.0.0.1";
  int port = default_port();
  auto* serve_cmd = app.add_subcommand("serve", "Serve the demo model over HTTP");
  serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "TCP port (default 8080, or FATGATE_PORT)")
      ->check(CLI::Range(1, 65535));

  std::string out_path;
  auto* emit_cmd = app.add_subcommand("emit-ts", "Write TypeScript bindings for the demo model");
  emit_cmd->add_option("--out", out_path, "Output file")->required();

  std::string call_path;
  std::optional<std::string> call_body;
  auto* call_cmd = app.add_subcommand("call", "Run one request against a fresh demo model");
  call_cmd->add_option("path", call_path, "Endpoint path, e.g. /model/t")->required();
  call_cmd->add_option("body", call_body, "JSON body; omit to read");

  std::string meta_path;
  std::string meta;
  auto* meta_cmd = app.add_subcommand("introspect", "Query @list, @type or @signature");
  meta_cmd->add_option("path", meta_path, "Endpoint path")->required();
  meta_cmd->add_option("meta", meta, "list, type or signature")
      ->required()
      ->check(CLI::IsMember({"list", "type", "signature"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fatgate: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*serve_cmd) {
      if (port < 1 || port > 65535) {
        err << "fatgate: invalid port (check FATGATE_PORT)\n";
        return 2;
      }
      return serve(host, port, err);
    }
    if (*emit_cmd) return emit_ts(out_path, err);
    if (*call_cmd) return call(call_path, call_body, out);
    if (*meta_cmd) return introspect(meta_path, meta, out);
  } catch (const std::exception& e) {
    err << "fatgate: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fatgate::cli
