#pragma once

// Bridges typed C++ callables onto the dynamic dispatch layer.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "fatgate/dispatch.hpp"
#include "fatgate/error.hpp"
#include "fatgate/value.hpp"

namespace fatgate {

template <class T>
struct ValueTraits;

template <std::integral I>
  requires(!std::same_as<I, bool>)
struct ValueTraits<I> {
  static ParamType param() { return ParamType::int_like(); }
  static Value to_value(I v) { return Value(static_cast<double>(v)); }
  // values arrive already truncated by convert()
  static I from_value(const Value& v) { return static_cast<I>(v.as_number()); }
};

template <std::floating_point F>
struct ValueTraits<F> {
  static ParamType param() { return ParamType::float_like(); }
  static Value to_value(F v) { return Value(static_cast<double>(v)); }
  static F from_value(const Value& v) { return static_cast<F>(v.as_number()); }
};

template <>
struct ValueTraits<bool> {
  static ParamType param() { return ParamType::bool_like(); }
  static Value to_value(bool v) { return Value(v); }
  static bool from_value(const Value& v) { return v.as_bool(); }
};

template <>
struct ValueTraits<std::string> {
  static ParamType param() { return ParamType::string_like(); }
  static Value to_value(const std::string& v) { return Value(v); }
  static std::string from_value(const Value& v) { return v.as_string(); }
};

template <class T>
struct ValueTraits<std::vector<T>> {
  static ParamType param() { return ParamType::sequence(ValueTraits<T>::param()); }
  static Value to_value(const std::vector<T>& v) {
    Array out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(ValueTraits<T>::to_value(e));
    return Value(std::move(out));
  }
  static std::vector<T> from_value(const Value& v) {
    std::vector<T> out;
    out.reserve(v.as_array().size());
    for (const auto& e : v.as_array()) out.push_back(ValueTraits<T>::from_value(e));
    return out;
  }
};

template <class T>
using bare_t = std::remove_cvref_t<T>;

template <class T>
ParamType param_type_of() {
  return ValueTraits<bare_t<T>>::param();
}

template <class R>
std::optional<ParamType> result_type_of() {
  if constexpr (std::is_void_v<R>) {
    return std::nullopt;
  } else {
    return ValueTraits<bare_t<R>>::param();
  }
}

namespace detail {

template <class R, class... Args, class Fn, std::size_t... I>
Value invoke_converted(Fn& fn, [[maybe_unused]] std::span<const Value> args, std::index_sequence<I...>) {
  // braced initialization fixes left-to-right conversion order
  std::tuple<bare_t<Args>...> converted{ValueTraits<bare_t<Args>>::from_value(args[I])...};
  if constexpr (std::is_void_v<R>) {
    std::apply(fn, std::move(converted));
    return Value();
  } else {
    auto result = std::apply(fn, std::move(converted));
    try {
      return ValueTraits<bare_t<R>>::to_value(result);
    } catch (const Error& e) {
      // an unrepresentable result is the callee's fault, not the caller's
      throw Error(ErrorCode::Internal, std::string("result not representable: ") + e.what());
    }
  }
}

template <class R, class... Args>
Overload make_overload(std::function<R(Args...)> fn) {
  Signature sig{result_type_of<R>(), {param_type_of<Args>()...}};
  Invoker invoker = [fn = std::move(fn)](std::span<const Value> args) mutable {
    return invoke_converted<R, Args...>(fn, args, std::index_sequence_for<Args...>{});
  };
  return Overload{std::move(sig), std::move(invoker)};
}

}  // namespace detail

/// Wraps a callable with concrete (non-template) parameter types.
template <class Fn>
Overload bind(Fn&& fn) {
  return detail::make_overload(std::function(std::forward<Fn>(fn)));
}

}  // namespace fatgate
