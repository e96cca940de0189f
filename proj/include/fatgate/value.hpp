#pragma once

// Dynamic value model: the marshaling currency for request bodies, method
// arguments, results and introspection output.

#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fatgate {

enum class ValueKind { Null, Bool, Number, String, Array, Object };

std::string_view to_string(ValueKind kind);

class Value;

using Array = std::vector<Value>;

/// Insertion-ordered map with unique keys.
class Object {
 public:
  using Member = std::pair<std::string, Value>;
  using const_iterator = std::vector<Member>::const_iterator;

  Object() = default;
  Object(std::initializer_list<Member> members);

  /// Appends a member. Returns false (and leaves the object untouched) if
  /// the key is already present.
  bool insert(std::string key, Value value);
  /// Appends or overwrites.
  void set(std::string key, Value value);

  const Value* find(std::string_view key) const;
  Value* find(std::string_view key);
  bool contains(std::string_view key) const { return find(key) != nullptr; }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const_iterator begin() const noexcept { return members_.begin(); }
  const_iterator end() const noexcept { return members_.end(); }

  friend bool operator==(const Object& lhs, const Object& rhs);

 private:
  std::vector<Member> members_;
};

class Value {
 public:
  Value() noexcept : data_(std::monostate{}) {}
  Value(std::nullptr_t) noexcept : data_(std::monostate{}) {}
  Value(bool b) noexcept : data_(b) {}
  /// Throws Error(NonFiniteNumber) for NaN or infinities.
  Value(double number);
  template <std::integral I>
    requires(!std::same_as<I, bool>)
  Value(I number) : Value(static_cast<double>(number)) {}
  Value(std::string text) noexcept : data_(std::move(text)) {}
  Value(std::string_view text) : data_(std::string(text)) {}
  Value(const char* text) : data_(std::string(text)) {}
  Value(Array elements) noexcept : data_(std::move(elements)) {}
  Value(Object members) noexcept : data_(std::move(members)) {}

  ValueKind kind() const noexcept {
    return static_cast<ValueKind>(data_.index());
  }

  bool is_null() const noexcept { return kind() == ValueKind::Null; }
  bool is_bool() const noexcept { return kind() == ValueKind::Bool; }
  bool is_number() const noexcept { return kind() == ValueKind::Number; }
  bool is_string() const noexcept { return kind() == ValueKind::String; }
  bool is_array() const noexcept { return kind() == ValueKind::Array; }
  bool is_object() const noexcept { return kind() == ValueKind::Object; }

  // Checked accessors; throw Error(Internal) on kind mismatch.
  bool as_bool() const;
  double as_number() const;
  const std::string& as_string() const;
  const Object& as_object() const;
  Object& as_object();

  /// The elements if this is an Array, an empty sequence otherwise.
  const Array& as_array() const noexcept;

  friend bool operator==(const Value& lhs, const Value& rhs) = default;

 private:
  std::variant<std::monostate, bool, double, std::string, Array, Object> data_;
};

inline ValueKind kind(const Value& v) noexcept { return v.kind(); }
inline const Array& as_array(const Value& v) noexcept { return v.as_array(); }

/// Parses one strict JSON document (RFC 8259). Object key order is kept.
/// Throws ParseError with code MalformedInput or NonFiniteNumber.
Value parse(std::string_view text);

/// Compact JSON. Integral numbers print without a fractional part; every
/// number prints with enough digits to read back bit-exact.
std::string serialize(const Value& v);

}  // namespace fatgate
