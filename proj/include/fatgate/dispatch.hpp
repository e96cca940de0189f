#pragma once

// Penalty-based overload resolution.
//
// Every overload in a set is scored against the dynamic argument list; the
// unique overload with the lowest finite score is called. Scores per
// argument:
//
//   exact kind match                          0
//   fractional Number -> IntLike              1
//   Bool -> IntLike/FloatLike                 2
//   Number 0 or 1 -> BoolLike                 2
//   Array -> Sequence(T)                      sum over elements
//   Object -> ObjectLike                      0 if every field is present and
//                                             converts, else infinite
//   anything else                             infinite
//
// A call whose argument count differs from the overload's arity is
// infinite. Ties at the finite minimum are errors.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fatgate/value.hpp"

namespace fatgate {

enum class ParamKind { IntLike, FloatLike, BoolLike, StringLike, Sequence, ObjectLike };

struct Field;

class ParamType {
 public:
  static ParamType int_like() { return ParamType(ParamKind::IntLike); }
  static ParamType float_like() { return ParamType(ParamKind::FloatLike); }
  static ParamType bool_like() { return ParamType(ParamKind::BoolLike); }
  static ParamType string_like() { return ParamType(ParamKind::StringLike); }
  static ParamType sequence(ParamType element);
  /// `fields` are the attributes an Object argument must carry. An empty
  /// list accepts any Object.
  static ParamType object_like(std::string type_name, std::vector<Field> fields = {});

  ParamKind kind() const noexcept { return kind_; }
  /// Sequence only.
  const ParamType& element() const;
  /// ObjectLike only.
  const std::string& type_name() const noexcept { return name_; }
  const std::vector<Field>& fields() const noexcept { return fields_; }

  /// Human-readable tag: int, double, bool, string, T[] or the type name.
  std::string tag() const;

  friend bool operator==(const ParamType& lhs, const ParamType& rhs);

 private:
  explicit ParamType(ParamKind kind) : kind_(kind) {}

  ParamKind kind_;
  std::string name_;
  std::vector<ParamType> element_;  // exactly one entry for Sequence
  std::vector<Field> fields_;
};

struct Field {
  std::string name;
  ParamType type;

  friend bool operator==(const Field&, const Field&) = default;
};

class Penalty {
 public:
  constexpr Penalty() = default;
  constexpr explicit Penalty(std::uint64_t score) : score_(score) {}
  static constexpr Penalty infinite() {
    Penalty p;
    p.finite_ = false;
    return p;
  }

  constexpr bool finite() const noexcept { return finite_; }
  /// Meaningless when infinite.
  constexpr std::uint64_t score() const noexcept { return score_; }

  constexpr Penalty operator+(Penalty other) const noexcept {
    if (!finite_ || !other.finite_) return infinite();
    return Penalty(score_ + other.score_);
  }
  constexpr Penalty& operator+=(Penalty other) noexcept { return *this = *this + other; }

  friend constexpr bool operator==(Penalty a, Penalty b) noexcept {
    return a.finite_ == b.finite_ && (!a.finite_ || a.score_ == b.score_);
  }
  friend constexpr std::strong_ordering operator<=>(Penalty a, Penalty b) noexcept {
    if (a.finite_ != b.finite_) return a.finite_ ? std::strong_ordering::less
                                                 : std::strong_ordering::greater;
    if (!a.finite_) return std::strong_ordering::equal;
    return a.score_ <=> b.score_;
  }

 private:
  std::uint64_t score_ = 0;
  bool finite_ = true;
};

struct Signature {
  std::optional<ParamType> result;  // nullopt is void
  std::vector<ParamType> params;

  std::size_t arity() const noexcept { return params.size(); }
  std::string result_tag() const { return result ? result->tag() : "void"; }
  /// {"ret": tag, "args": [tag...]}
  Value to_value() const;
  /// name(tag, tag) -> tag
  std::string describe(std::string_view name) const;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Invokers receive arguments already converted by convert().
using Invoker = std::function<Value(std::span<const Value>)>;

struct Overload {
  Signature signature;
  Invoker invoke;
};

class OverloadSet {
 public:
  /// Throws Error(Internal) when empty or when two overloads share a
  /// parameter list.
  OverloadSet(std::string name, std::vector<Overload> overloads);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Overload>& overloads() const noexcept { return overloads_; }
  std::vector<Signature> signatures() const;

 private:
  std::string name_;
  std::vector<Overload> overloads_;
};

Penalty arg_penalty(const ParamType& param, const Value& arg);
Penalty overload_penalty(const Signature& signature, std::span<const Value> args);
inline Penalty overload_penalty(const Overload& o, std::span<const Value> args) {
  return overload_penalty(o.signature, args);
}

/// Unique lowest finite-penalty overload. Throws Error(NoMatch) or
/// Error(Ambiguous); the latter lists the tied candidates.
const Overload& resolve(const OverloadSet& set, std::span<const Value> args);

/// Normalizes `arg` to the shape the parameter expects: IntLike truncates
/// toward zero, BoolLike maps 0/1 to false/true, ObjectLike keeps only the
/// declared fields. Throws Error(Internal) when the pair scores infinite.
Value convert(const ParamType& param, const Value& arg);

/// resolve, convert left to right, invoke. When `array_body` is given (the
/// arguments were unpacked from it) and the tuple finds no match, the
/// whole array is retried as a single argument.
///
/// fatgate::Error thrown by an invoker propagates unchanged; any other
/// exception becomes Error(Internal) carrying its message.
Value resolve_and_call(const OverloadSet& set, std::span<const Value> args,
                       const Value* array_body = nullptr);

}  // namespace fatgate
