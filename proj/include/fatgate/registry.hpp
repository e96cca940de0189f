#pragma once

// The endpoint tree. A pathinfo such as
//
//   /model/group/items/@elem/0/@type
//
// is resolved segment by segment from the root node. Plain segments name
// children, `@elem/<index>` steps into a container element, and a trailing
// `@list`, `@type` or `@signature` asks for introspection instead of data.
//
// A request without a body reads; a request with a body writes or calls.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fatgate/dispatch.hpp"
#include "fatgate/error.hpp"
#include "fatgate/value.hpp"

namespace fatgate {

enum class Meta { List, Type, Signature, Elem };

std::string_view to_string(Meta meta);

struct Segment {
  enum class Kind { Name, Meta, Index };

  Kind kind;
  std::string name;   // Name
  Meta meta{};        // Meta
  std::size_t index{};  // Index

  friend bool operator==(const Segment&, const Segment&) = default;
};

class Path {
 public:
  Path() = default;

  /// Throws Error(NotFound) for unknown or misplaced segments and
  /// Error(BadIndex) when the token after `@elem` is not a non-negative
  /// integer.
  static Path parse(std::string_view pathinfo);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }

  /// Trailing @list/@type/@signature, if any.
  std::optional<Meta> trailing_meta() const;
  /// This path without its trailing introspection segment.
  Path without_meta() const;
  Path child(std::string name) const;

  std::string str() const;

  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<Segment> segments_;
};

bool is_valid_name(std::string_view name);

struct TypeDescriptor {
  std::string name;
  std::optional<std::string> supertype;
  /// Attribute types. ObjectLike means a nested node; Sequence(ObjectLike)
  /// a container of nodes.
  std::map<std::string, ParamType> attributes;
  std::map<std::string, std::vector<Signature>> methods;
  bool polymorphic = false;

  friend bool operator==(const TypeDescriptor&, const TypeDescriptor&) = default;
};

enum class HandlerKind { Attribute, Method, Container, Node };

/// Endpoint wrapper. The meta operations mirror the introspection
/// endpoints; read/assign move whole values for data-bearing handlers.
class Handler {
 public:
  virtual ~Handler() = default;

  virtual HandlerKind kind() const = 0;
  virtual Value process(const std::optional<Value>& body) = 0;
  /// Array of {ret, args} objects.
  virtual Value signature() const = 0;
  /// Sorted child endpoint names.
  virtual Value list() const = 0;
  virtual std::string type() const = 0;

  virtual std::shared_ptr<Handler> child(std::string_view name) const;
  virtual std::shared_ptr<Handler> element(std::size_t index) const;

  virtual bool is_data() const { return false; }
  virtual Value read() const;
  virtual void assign(const Value& value);
};

using HandlerPtr = std::shared_ptr<Handler>;
using ChildMap = std::map<std::string, HandlerPtr, std::less<>>;

/// Scalar or scalar-sequence attribute: an implied getter/setter pair.
class AttributeHandler : public Handler {
 public:
  using Getter = std::function<Value()>;
  /// Receives the value already converted to the attribute type.
  using Setter = std::function<void(const Value&)>;

  /// A null setter makes the attribute read-only.
  AttributeHandler(ParamType type, Getter get, Setter set);

  HandlerKind kind() const override { return HandlerKind::Attribute; }
  Value process(const std::optional<Value>& body) override;
  Value signature() const override;
  Value list() const override;
  std::string type() const override { return type_.tag(); }

  bool is_data() const override { return true; }
  Value read() const override { return get_(); }
  void assign(const Value& value) override;

 private:
  OverloadSet accessors() const;

  ParamType type_;
  Getter get_;
  Setter set_;
};

class MethodHandler : public Handler {
 public:
  explicit MethodHandler(OverloadSet overloads) : overloads_(std::move(overloads)) {}

  HandlerKind kind() const override { return HandlerKind::Method; }
  Value process(const std::optional<Value>& body) override;
  Value signature() const override;
  Value list() const override { return Value(Array{}); }
  std::string type() const override { return "method"; }

  const OverloadSet& overloads() const noexcept { return overloads_; }

 private:
  OverloadSet overloads_;
};

/// Sequence of nodes; elements are reached through `@elem/<index>`.
class ContainerHandler : public Handler {
 public:
  using Size = std::function<std::size_t()>;
  using Element = std::function<HandlerPtr(std::size_t)>;

  ContainerHandler(std::string element_type, Size size, Element element);

  HandlerKind kind() const override { return HandlerKind::Container; }
  /// Without a body, the element values. With one, an elementwise write of
  /// an array of the same length.
  Value process(const std::optional<Value>& body) override;
  Value signature() const override;
  Value list() const override;
  std::string type() const override { return element_type_ + "[]"; }

  HandlerPtr element(std::size_t index) const override;

  bool is_data() const override { return true; }
  Value read() const override;
  void assign(const Value& value) override;

 private:
  std::string element_type_;
  Size size_;
  Element element_;
};

class NodeHandler : public Handler {
 public:
  NodeHandler(TypeDescriptor descriptor, ChildMap children);

  HandlerKind kind() const override { return HandlerKind::Node; }
  Value process(const std::optional<Value>& body) override;
  Value signature() const override;
  Value list() const override;
  std::string type() const override { return descriptor_.name; }

  HandlerPtr child(std::string_view name) const override;

  bool is_data() const override { return true; }
  /// All data-bearing children, recursively. Methods are never included.
  Value read() const override;
  /// Assigns the keys present in `value`. Unknown keys are MalformedInput.
  void assign(const Value& value) override;

  const TypeDescriptor& descriptor() const noexcept { return descriptor_; }
  const ChildMap& children() const noexcept { return children_; }
  /// Throws Error(DuplicateName) or Error(MalformedInput) for a bad name.
  void add_child(std::string name, HandlerPtr handler);

 private:
  TypeDescriptor descriptor_;
  ChildMap children_;
};

struct Request {
  Path path;
  std::optional<Value> body;
};

class Response {
 public:
  static Response ok(Value value) { return Response(std::move(value)); }
  static Response error(ErrorCode code, std::string message);
  static Response from_exception(const std::exception& e);

  bool is_ok() const noexcept { return std::holds_alternative<Value>(data_); }
  const Value& value() const;
  ErrorCode code() const;
  const std::string& message() const;

  /// Ok: the value; Error: {"error": code, "message": text}.
  Value to_value() const;
  std::string to_json() const { return serialize(to_value()); }

 private:
  struct Failure {
    ErrorCode code;
    std::string message;
  };
  explicit Response(Value v) : data_(std::move(v)) {}
  explicit Response(Failure f) : data_(std::move(f)) {}

  std::variant<Value, Failure> data_;
};

/// absent -> (); Array -> its elements; anything else -> (value).
std::vector<Value> normalize_args(const std::optional<Value>& body);

/// Endpoint map rooted at an unnamed node. Public entry points run one at a
/// time; registration must finish before serving starts.
class Registry {
 public:
  Registry();

  Response process(const Request& request);
  /// Parses `pathinfo` first; parse failures come back as error responses.
  Response process(std::string_view pathinfo, std::optional<Value> body = std::nullopt);

  Response list(const Path& path) const;
  Response type_of(const Path& path) const;
  Response signature_of(const Path& path) const;

  /// Adds a node under `parent`. `descriptor` is recorded as a type; nodes
  /// placed at the root are recorded as root instances.
  void register_node(const Path& parent, std::string name, TypeDescriptor descriptor,
                     ChildMap children);
  /// Adds a handler of any kind under `parent`.
  void register_handler(const Path& parent, std::string name, HandlerPtr handler);
  /// Records a type reachable from registered nodes. Re-adding an identical
  /// descriptor is a no-op; a conflicting one is Error(DuplicateName).
  void add_type(TypeDescriptor descriptor);

  const std::map<std::string, TypeDescriptor>& types() const noexcept { return types_; }
  /// Root instance name -> type name.
  const std::map<std::string, std::string>& roots() const noexcept { return roots_; }

 private:
  HandlerPtr resolve(const Path& path) const;
  Response introspect(const Path& path, Meta meta) const;

  std::shared_ptr<NodeHandler> root_;
  std::map<std::string, TypeDescriptor> types_;
  std::map<std::string, std::string> roots_;
  mutable std::mutex mutex_;
};

}  // namespace fatgate
