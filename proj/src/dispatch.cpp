#include "fatgate/dispatch.hpp"

#include <cmath>
#include <exception>

#include "fatgate/error.hpp"

namespace fatgate {

ParamType ParamType::sequence(ParamType element) {
  ParamType p(ParamKind::Sequence);
  p.element_.push_back(std::move(element));
  return p;
}

ParamType ParamType::object_like(std::string type_name, std::vector<Field> fields) {
  ParamType p(ParamKind::ObjectLike);
  p.name_ = std::move(type_name);
  p.fields_ = std::move(fields);
  return p;
}

const ParamType& ParamType::element() const {
  if (kind_ != ParamKind::Sequence) {
    throw Error(ErrorCode::Internal, "element() on non-sequence parameter type");
  }
  return element_.front();
}

std::string ParamType::tag() const {
  switch (kind_) {
    case ParamKind::IntLike: return "int";
    case ParamKind::FloatLike: return "double";
    case ParamKind::BoolLike: return "bool";
    case ParamKind::StringLike: return "string";
    case ParamKind::Sequence: return element().tag() + "[]";
    case ParamKind::ObjectLike: return name_;
  }
  return "?";
}

bool operator==(const ParamType& lhs, const ParamType& rhs) {
  return lhs.kind_ == rhs.kind_ && lhs.name_ == rhs.name_ && lhs.element_ == rhs.element_ &&
         lhs.fields_ == rhs.fields_;
}

Value Signature::to_value() const {
  Array args;
  for (const auto& p : params) args.emplace_back(p.tag());
  return Value(Object{{"ret", result_tag()}, {"args", std::move(args)}});
}

std::string Signature::describe(std::string_view name) const {
  std::string out(name);
  out += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].tag();
  }
  out += ") -> ";
  out += result_tag();
  return out;
}

OverloadSet::OverloadSet(std::string name, std::vector<Overload> overloads)
    : name_(std::move(name)), overloads_(std::move(overloads)) {
  if (overloads_.empty()) {
    throw Error(ErrorCode::Internal, "overload set '" + name_ + "' is empty");
  }
  for (std::size_t i = 0; i < overloads_.size(); ++i) {
    for (std::size_t j = i + 1; j < overloads_.size(); ++j) {
      if (overloads_[i].signature.params == overloads_[j].signature.params) {
        throw Error(ErrorCode::Internal,
                    "duplicate overload " + overloads_[i].signature.describe(name_));
      }
    }
  }
}

std::vector<Signature> OverloadSet::signatures() const {
  std::vector<Signature> out;
  out.reserve(overloads_.size());
  for (const auto& o : overloads_) out.push_back(o.signature);
  return out;
}

namespace {

constexpr Penalty kExact{0};
constexpr Penalty kFractional{1};
constexpr Penalty kBoolNumber{2};

// int64 range in doubles: [-2^63, 2^63)
constexpr double kIntLow = -9223372036854775808.0;
constexpr double kIntHigh = 9223372036854775808.0;

bool fits_int(double d) { return d >= kIntLow && d < kIntHigh; }

}  // namespace

Penalty arg_penalty(const ParamType& param, const Value& arg) {
  switch (param.kind()) {
    case ParamKind::IntLike:
      if (arg.is_number()) {
        double d = arg.as_number();
        if (!fits_int(d)) return Penalty::infinite();
        return std::trunc(d) == d ? kExact : kFractional;
      }
      if (arg.is_bool()) return kBoolNumber;
      return Penalty::infinite();
    case ParamKind::FloatLike:
      if (arg.is_number()) return kExact;
      if (arg.is_bool()) return kBoolNumber;
      return Penalty::infinite();
    case ParamKind::BoolLike:
      if (arg.is_bool()) return kExact;
      if (arg.is_number() && (arg.as_number() == 0 || arg.as_number() == 1)) return kBoolNumber;
      return Penalty::infinite();
    case ParamKind::StringLike:
      return arg.is_string() ? kExact : Penalty::infinite();
    case ParamKind::Sequence: {
      if (!arg.is_array()) return Penalty::infinite();
      Penalty total = kExact;
      for (const auto& e : arg.as_array()) {
        total += arg_penalty(param.element(), e);
        if (!total.finite()) break;
      }
      return total;
    }
    case ParamKind::ObjectLike: {
      if (!arg.is_object()) return Penalty::infinite();
      for (const auto& field : param.fields()) {
        const Value* v = arg.as_object().find(field.name);
        if (!v || !arg_penalty(field.type, *v).finite()) return Penalty::infinite();
      }
      return kExact;
    }
  }
  return Penalty::infinite();
}

Penalty overload_penalty(const Signature& signature, std::span<const Value> args) {
  if (args.size() != signature.arity()) return Penalty::infinite();
  Penalty total = kExact;
  for (std::size_t i = 0; i < args.size() && total.finite(); ++i) {
    total += arg_penalty(signature.params[i], args[i]);
  }
  return total;
}

const Overload& resolve(const OverloadSet& set, std::span<const Value> args) {
  const auto& overloads = set.overloads();
  std::vector<Penalty> scores;
  scores.reserve(overloads.size());
  Penalty best = Penalty::infinite();
  for (const auto& o : overloads) {
    scores.push_back(overload_penalty(o, args));
    if (scores.back() < best) best = scores.back();
  }
  if (!best.finite()) {
    std::string got;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) got += ", ";
      got += to_string(args[i].kind());
    }
    throw Error(ErrorCode::NoMatch,
                "no overload of '" + set.name() + "' accepts (" + got + ")");
  }
  const Overload* chosen = nullptr;
  std::string candidates;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < overloads.size(); ++i) {
    if (scores[i] != best) continue;
    ++ties;
    chosen = &overloads[i];
    if (!candidates.empty()) candidates += "; ";
    candidates += overloads[i].signature.describe(set.name());
  }
  if (ties > 1) {
    throw Error(ErrorCode::Ambiguous, "ambiguous call to '" + set.name() +
                                          "', candidates: " + candidates);
  }
  return *chosen;
}

Value convert(const ParamType& param, const Value& arg) {
  if (!arg_penalty(param, arg).finite()) {
    throw Error(ErrorCode::Internal, "cannot convert " + std::string(to_string(arg.kind())) +
                                         " to " + param.tag());
  }
  switch (param.kind()) {
    case ParamKind::IntLike:
      if (arg.is_bool()) return Value(arg.as_bool() ? 1.0 : 0.0);
      return Value(std::trunc(arg.as_number()));
    case ParamKind::FloatLike:
      if (arg.is_bool()) return Value(arg.as_bool() ? 1.0 : 0.0);
      return arg;
    case ParamKind::BoolLike:
      if (arg.is_number()) return Value(arg.as_number() == 1);
      return arg;
    case ParamKind::StringLike:
      return arg;
    case ParamKind::Sequence: {
      Array out;
      out.reserve(arg.as_array().size());
      for (const auto& e : arg.as_array()) out.push_back(convert(param.element(), e));
      return Value(std::move(out));
    }
    case ParamKind::ObjectLike: {
      if (param.fields().empty()) return arg;
      Object out;
      for (const auto& field : param.fields()) {
        out.insert(field.name, convert(field.type, *arg.as_object().find(field.name)));
      }
      return Value(std::move(out));
    }
  }
  return arg;
}

namespace {

Value call(const Overload& overload, std::span<const Value> args) {
  std::vector<Value> converted;
  converted.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    converted.push_back(convert(overload.signature.params[i], args[i]));
  }
  try {
    return overload.invoke(converted);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::Internal, e.what());
  }
}

}  // namespace

Value resolve_and_call(const OverloadSet& set, std::span<const Value> args,
                       const Value* array_body) {
  const Overload* chosen = nullptr;
  std::span<const Value> used = args;
  try {
    chosen = &resolve(set, args);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoMatch || array_body == nullptr) throw;
    used = std::span<const Value>(array_body, 1);
    try {
      chosen = &resolve(set, used);
    } catch (const Error& retry) {
      if (retry.code() == ErrorCode::NoMatch) throw e;
      throw;
    }
  }
  return call(*chosen, used);
}

}  // namespace fatgate
