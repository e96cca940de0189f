#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fatgate/binding.hpp"
#include "fatgate/dispatch.hpp"
#include "fatgate/error.hpp"
#include "oracle/generators.hpp"
#include "oracle/penalty_oracle.hpp"

using namespace fatgate;

namespace {

const ParamType kInt = ParamType::int_like();
const ParamType kFloat = ParamType::float_like();
const ParamType kBool = ParamType::bool_like();
const ParamType kString = ParamType::string_like();

Penalty P(std::uint64_t n) { return Penalty(n); }

// Overloads whose invoker returns their own index.
OverloadSet tagged(const std::vector<Signature>& sigs) {
  std::vector<Overload> out;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    out.push_back({sigs[i], [i](std::span<const Value>) { return Value(static_cast<double>(i)); }});
  }
  return OverloadSet("f", std::move(out));
}

ErrorCode resolve_error(const OverloadSet& set, const std::vector<Value>& args) {
  try {
    resolve(set, args);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

std::optional<std::size_t> chosen_index(const OverloadSet& set, const std::vector<Value>& args,
                                        ErrorCode* failure) {
  try {
    return static_cast<std::size_t>(&resolve(set, args) - set.overloads().data());
  } catch (const Error& e) {
    *failure = e.code();
    return std::nullopt;
  }
}

}  // namespace

TEST_CASE("arg_penalty table") {
  CHECK(arg_penalty(kInt, Value(2.5)) == P(1));
  CHECK(arg_penalty(kFloat, Value(2.5)) == P(0));
  CHECK_FALSE(arg_penalty(kInt, Value("x")).finite());
  CHECK(arg_penalty(ParamType::sequence(kInt), Value(Array{Value(1), Value(2)})) == P(0));

  CHECK(arg_penalty(kInt, Value(true)) == P(2));
  CHECK(arg_penalty(kFloat, Value(false)) == P(2));
  CHECK(arg_penalty(kBool, Value(1)) == P(2));
  CHECK(arg_penalty(kBool, Value(0)) == P(2));
  CHECK_FALSE(arg_penalty(kBool, Value(2)).finite());
  CHECK_FALSE(arg_penalty(kString, Value(1)).finite());
  CHECK_FALSE(arg_penalty(kInt, Value()).finite());
  CHECK_FALSE(arg_penalty(kInt, Value(1e19)).finite());
  CHECK(arg_penalty(kFloat, Value(1e19)) == P(0));
  CHECK(arg_penalty(ParamType::sequence(kInt), Value(Array{Value(0.5), Value(true)})) == P(3));
  CHECK(arg_penalty(ParamType::sequence(kInt), Value(Array{})) == P(0));
  CHECK_FALSE(arg_penalty(ParamType::sequence(kInt), Value(1)).finite());

  ParamType point = ParamType::object_like("Point", {{"x", kFloat}, {"y", kFloat}});
  CHECK(arg_penalty(point, Value(Object{{"x", 1}, {"y", 2}, {"z", 3}})) == P(0));
  CHECK_FALSE(arg_penalty(point, Value(Object{{"x", 1}})).finite());
  CHECK_FALSE(arg_penalty(point, Value(Object{{"x", 1}, {"y", "no"}})).finite());
}

TEST_CASE("overload_penalty") {
  Signature two{std::nullopt, {kInt, kFloat}};
  Value one_arg[] = {Value(1)};
  CHECK_FALSE(overload_penalty(two, one_arg).finite());
  CHECK(overload_penalty(Signature{}, std::span<const Value>{}) == P(0));
  Value args[] = {Value(2.5), Value(2.5)};
  CHECK(overload_penalty(two, args) == P(1));
}

TEST_CASE("resolve examples") {
  auto set = tagged({{std::nullopt, {kInt}}, {std::nullopt, {kFloat}}});
  CHECK(&resolve(set, std::vector<Value>{Value(2.5)}) == &set.overloads()[1]);
  CHECK(resolve_error(set, {Value(3)}) == ErrorCode::Ambiguous);
  auto strings = tagged({{std::nullopt, {kString}}});
  CHECK(resolve_error(strings, {Value(1)}) == ErrorCode::NoMatch);
}

TEST_CASE("ambiguity message names the candidates") {
  auto set = tagged({{std::nullopt, {kInt}}, {std::nullopt, {kFloat}}});
  try {
    resolve(set, std::vector<Value>{Value(3)});
    FAIL("no throw");
  } catch (const Error& e) {
    std::string what = e.what();
    CHECK(what.find("f(int)") != std::string::npos);
    CHECK(what.find("f(double)") != std::string::npos);
  }
}

TEST_CASE("convert") {
  CHECK(convert(kInt, Value(2.5)) == Value(2));
  CHECK(convert(kInt, Value(-2.5)) == Value(-2));
  CHECK(convert(kBool, Value(true)) == Value(true));
  CHECK(convert(kBool, Value(1)) == Value(true));
  CHECK(convert(kInt, Value(true)) == Value(1));
  CHECK(convert(ParamType::sequence(kFloat), Value(Array{Value(1), Value(2.5)})) ==
        Value(Array{Value(1.0), Value(2.5)}));
  ParamType point = ParamType::object_like("Point", {{"x", kInt}});
  CHECK(convert(point, Value(Object{{"y", 0}, {"x", 1.5}})) == Value(Object{{"x", 1}}));
  CHECK_THROWS_AS(convert(kString, Value(1)), Error);
}

TEST_CASE("overload set validation") {
  CHECK_THROWS_AS(OverloadSet("f", {}), Error);
  CHECK_THROWS_AS(tagged({{std::nullopt, {kInt}}, {ParamType::float_like(), {kInt}}}), Error);
}

TEST_CASE("resolve_and_call converts and falls back to the whole array") {
  std::vector<Overload> overloads{
      bind([](int n) { return n * 2; }),
      bind([](std::vector<double> xs) { return static_cast<int>(xs.size()); }),
  };
  OverloadSet set("g", std::move(overloads));
  CHECK(resolve_and_call(set, std::vector<Value>{Value(2.9)}) == Value(4));

  Value body(Array{Value(1), Value(2), Value(3)});
  CHECK(resolve_and_call(set, body.as_array(), &body) == Value(3));
  CHECK_THROWS_AS(resolve_and_call(set, body.as_array()), Error);
}

TEST_CASE("invoker errors: library errors pass through, others become Internal") {
  OverloadSet lib("a", {bind([]() -> int { throw Error(ErrorCode::MalformedInput, "bad"); })});
  OverloadSet std_err("b", {bind([]() -> int { throw std::invalid_argument("nope"); })});
  try {
    resolve_and_call(lib, std::span<const Value>{});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedInput);
  }
  try {
    resolve_and_call(std_err, std::span<const Value>{});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Internal);
    CHECK(std::string(e.what()) == "nope");
  }
}

TEST_CASE("a non-finite result is an internal error") {
  OverloadSet nan("n", {bind([] { return std::nan(""); })});
  try {
    resolve_and_call(nan, std::span<const Value>{});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Internal);
  }
}

TEST_CASE("bound signatures") {
  Overload o = bind([](const std::string&, bool) {});
  CHECK(o.signature.to_value() == parse(R"({"ret":"void","args":["string","bool"]})"));
  Overload v = bind([](std::vector<int>) { return 1.0; });
  CHECK(v.signature.describe("h") == "h(int[]) -> double");
}

TEST_CASE("resolve agrees with the exhaustive scorer") {
  gen::Rng rng(7);
  for (int round = 0; round < 500; ++round) {
    auto sigs = gen::signatures(rng, 5, 4);
    auto set = tagged(sigs);
    for (int k = 0; k < 5; ++k) {
      auto args = gen::args_for(rng, sigs, 4);
      for (std::size_t i = 0; i < sigs.size(); ++i) {
        long expect = oracle::score(sigs[i], args);
        Penalty got = overload_penalty(sigs[i], args);
        REQUIRE(got.finite() == (expect != oracle::kInf));
        if (got.finite()) REQUIRE(got.score() == static_cast<std::uint64_t>(expect));
      }
      auto verdict = oracle::exhaustive_resolve(sigs, args);
      ErrorCode failure{};
      auto index = chosen_index(set, args, &failure);
      switch (verdict.kind) {
        case oracle::Verdict::Kind::Chosen:
          REQUIRE(index);
          CHECK(*index == verdict.index);
          break;
        case oracle::Verdict::Kind::NoMatch:
          REQUIRE_FALSE(index);
          CHECK(failure == ErrorCode::NoMatch);
          break;
        case oracle::Verdict::Kind::Ambiguous:
          REQUIRE_FALSE(index);
          CHECK(failure == ErrorCode::Ambiguous);
          break;
      }
    }
  }
}

TEST_CASE("resolution properties: monotone, order-independent, deterministic, convertible") {
  gen::Rng rng(99);
  std::mt19937 shuffler(3);
  for (int round = 0; round < 400; ++round) {
    auto sigs = gen::signatures(rng, 5, 3);
    auto set = tagged(sigs);
    auto args = gen::args_for(rng, sigs, 3);

    ErrorCode failure{};
    auto index = chosen_index(set, args, &failure);
    ErrorCode again_failure{};
    CHECK(chosen_index(set, args, &again_failure) == index);

    if (index) {
      Penalty best = overload_penalty(sigs[*index], args);
      for (const auto& s : sigs) CHECK(best <= overload_penalty(s, args));
      // the chosen overload's arguments always convert
      for (std::size_t i = 0; i < args.size(); ++i) {
        CHECK_NOTHROW(convert(sigs[*index].params[i], args[i]));
      }
    }

    std::vector<std::size_t> order(sigs.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), shuffler);
    std::vector<Signature> permuted;
    for (auto i : order) permuted.push_back(sigs[i]);
    auto pset = tagged(permuted);
    ErrorCode pfailure{};
    auto pindex = chosen_index(pset, args, &pfailure);
    REQUIRE(pindex.has_value() == index.has_value());
    if (index) {
      CHECK(order[*pindex] == *index);
    } else {
      CHECK(pfailure == failure);
    }
  }
}

TEST_CASE("every finite penalty converts") {
  gen::Rng rng(1234);
  for (int i = 0; i < 3000; ++i) {
    ParamType p = gen::param(rng);
    Value a = gen::arg_for(rng, p);
    if (arg_penalty(p, a).finite()) {
      CHECK_NOTHROW(convert(p, a));
    } else {
      CHECK_THROWS_AS(convert(p, a), Error);
    }
  }
}
