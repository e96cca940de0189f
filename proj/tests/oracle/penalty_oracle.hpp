#pragma once

// Reference overload scorer for tests. Written from the penalty table alone
// and kept apart from src/dispatch.cpp: it classifies each argument into a
// coarse shape and looks the (parameter, shape) pair up in a literal table,
// then scores every overload exhaustively.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "fatgate/dispatch.hpp"

namespace oracle {

using fatgate::ParamKind;
using fatgate::ParamType;
using fatgate::Value;
using fatgate::ValueKind;

inline constexpr long kInf = -1;  // sentinel for "no conversion"

enum class Shape { Null, BoolValue, WholeNumber, FractionalNumber, ZeroOrOne, HugeNumber, Text, List, Record };

inline Shape shape_of(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Null: return Shape::Null;
    case ValueKind::Bool: return Shape::BoolValue;
    case ValueKind::String: return Shape::Text;
    case ValueKind::Array: return Shape::List;
    case ValueKind::Object: return Shape::Record;
    case ValueKind::Number: {
      double d = v.as_number();
      if (d == 0.0 || d == 1.0) return Shape::ZeroOrOne;
      if (std::fabs(d) >= 9.2233720368547758e18) return Shape::HugeNumber;
      return std::floor(d) == d ? Shape::WholeNumber : Shape::FractionalNumber;
    }
  }
  return Shape::Null;
}

// rows: IntLike, FloatLike, BoolLike, StringLike
// cols: Null, Bool, Whole, Fractional, ZeroOrOne, Huge, Text
inline constexpr long kTable[4][7] = {
    {kInf, 2, 0, 1, 0, kInf, kInf},
    {kInf, 2, 0, 0, 0, 0, kInf},
    {kInf, 0, kInf, kInf, 2, kInf, kInf},
    {kInf, kInf, kInf, kInf, kInf, kInf, 0},
};

inline long add(long a, long b) { return (a == kInf || b == kInf) ? kInf : a + b; }

inline long score(const ParamType& p, const Value& v) {
  Shape s = shape_of(v);
  switch (p.kind()) {
    case ParamKind::Sequence: {
      if (s != Shape::List) return kInf;
      long total = 0;
      for (const auto& e : v.as_array()) total = add(total, score(p.element(), e));
      return total;
    }
    case ParamKind::ObjectLike: {
      if (s != Shape::Record) return kInf;
      for (const auto& f : p.fields()) {
        const Value* member = v.as_object().find(f.name);
        if (member == nullptr || score(f.type, *member) == kInf) return kInf;
      }
      return 0;
    }
    default:
      break;
  }
  if (s == Shape::List || s == Shape::Record) return kInf;
  int row = static_cast<int>(p.kind());  // IntLike..StringLike are 0..3
  // -2^63 is representable and in range; the only huge value that still fits
  if (p.kind() == ParamKind::IntLike && s == Shape::HugeNumber &&
      v.as_number() == -9223372036854775808.0) {
    return 0;
  }
  return kTable[row][static_cast<int>(s)];
}

inline long score(const fatgate::Signature& sig, std::span<const Value> args) {
  if (sig.params.size() != args.size()) return kInf;
  long total = 0;
  for (std::size_t i = 0; i < args.size(); ++i) total = add(total, score(sig.params[i], args[i]));
  return total;
}

struct Verdict {
  enum class Kind { Chosen, NoMatch, Ambiguous } kind;
  std::size_t index = 0;
};

inline Verdict exhaustive_resolve(const std::vector<fatgate::Signature>& sigs,
                                  std::span<const Value> args) {
  long best = std::numeric_limits<long>::max();
  std::vector<std::size_t> at_best;
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    long s = score(sigs[i], args);
    if (s == kInf) continue;
    if (s < best) {
      best = s;
      at_best = {i};
    } else if (s == best) {
      at_best.push_back(i);
    }
  }
  if (at_best.empty()) return {Verdict::Kind::NoMatch};
  if (at_best.size() > 1) return {Verdict::Kind::Ambiguous};
  return {Verdict::Kind::Chosen, at_best.front()};
}

}  // namespace oracle
