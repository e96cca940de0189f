#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fatgate/cli.hpp"
#include "fatgate/value.hpp"

using namespace fatgate;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "fatgate");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

}  // namespace

TEST_CASE("call reads an attribute") {
  auto r = run({"call", "/model/t"});
  CHECK(r.status == 0);
  CHECK(r.out == "0");
}

TEST_CASE("call with a body runs a method") {
  auto path = std::filesystem::temp_directory_path() / "fatgate_cli_eq.txt";
  std::filesystem::remove(path);
  auto r = run({"call", "/model/exportEquations", "[\"" + path.string() + "\", true]"});
  CHECK(r.status == 0);
  CHECK(r.out == "null");
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "# equations");
  std::filesystem::remove(path);

  auto step = run({"call", "/model/step", "[3]"});
  CHECK(step.status == 0);
  CHECK(parse(step.out).as_number() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("call errors exit 1 with one JSON document") {
  auto r = run({"call", "/model/step", "[\"x\"]"});
  CHECK(r.status == 1);
  Value v = parse(r.out);
  CHECK(v.as_object().find("error")->as_string() == "NoMatch");

  auto missing = run({"call", "/nope"});
  CHECK(missing.status == 1);
  CHECK(parse(missing.out).as_object().find("error")->as_string() == "NotFound");

  auto bad_json = run({"call", "/model/t", "{"});
  CHECK(bad_json.status == 1);
  CHECK(parse(bad_json.out).as_object().find("error")->as_string() == "MalformedInput");
}

TEST_CASE("introspect") {
  auto list = run({"introspect", "/model", "list"});
  CHECK(list.status == 0);
  CHECK(list.out == R"(["classifyOp","dt","exportEquations","group","reset","step","t"])");
  CHECK(run({"introspect", "/model", "type"}).out == "\"Model\"");
  CHECK(run({"introspect", "/model/exportEquations", "signature"}).out ==
        R"([{"ret":"void","args":["string","bool"]}])");
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).status == 2);
  CHECK(run({"bogus"}).status == 2);
  CHECK(run({"call"}).status == 2);
  CHECK(run({"introspect", "/model", "size"}).status == 2);
  CHECK(run({"emit-ts"}).status == 2);
  CHECK(run({"serve", "--port", "70000"}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("emit-ts writes the bindings and reports I/O failures") {
  auto path = std::filesystem::temp_directory_path() / "fatgate_cli_bindings.ts";
  auto r = run({"emit-ts", "--out", path.string()});
  CHECK(r.status == 0);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str().find("export const model = new Model('model');") != std::string::npos);
  std::filesystem::remove(path);

  auto bad = run({"emit-ts", "--out", "/nonexistent-dir/x.ts"});
  CHECK(bad.status == 1);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("serve rejects a bad FATGATE_PORT") {
  setenv("FATGATE_PORT", "not-a-port", 1);
  CHECK(run({"serve"}).status == 2);
  unsetenv("FATGATE_PORT");
}
