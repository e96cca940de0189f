#include "fatgate/registry.hpp"

#include <charconv>

namespace fatgate {

std::string_view to_string(Meta meta) {
  switch (meta) {
    case Meta::List: return "@list";
    case Meta::Type: return "@type";
    case Meta::Signature: return "@signature";
    case Meta::Elem: return "@elem";
  }
  return "@?";
}

bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name.front())) return false;
  for (char c : name) {
    if (!alpha(c) && !digit(c)) return false;
  }
  return true;
}

// ---- Path -------------------------------------------------------------------

namespace {

std::optional<Meta> meta_from(std::string_view token) {
  if (token == "@list") return Meta::List;
  if (token == "@type") return Meta::Type;
  if (token == "@signature") return Meta::Signature;
  if (token == "@elem") return Meta::Elem;
  return std::nullopt;
}

std::vector<std::string_view> split(std::string_view pathinfo) {
  if (!pathinfo.empty() && pathinfo.front() == '/') pathinfo.remove_prefix(1);
  if (!pathinfo.empty() && pathinfo.back() == '/') pathinfo.remove_suffix(1);
  std::vector<std::string_view> tokens;
  if (pathinfo.empty()) return tokens;
  std::size_t start = 0;
  for (;;) {
    auto slash = pathinfo.find('/', start);
    tokens.push_back(pathinfo.substr(start, slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return tokens;
}

}  // namespace

Path Path::parse(std::string_view pathinfo) {
  Path path;
  auto tokens = split(pathinfo);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string_view token = tokens[i];
    if (auto meta = meta_from(token)) {
      if (*meta == Meta::Elem) {
        if (i + 1 == tokens.size()) {
          throw Error(ErrorCode::BadIndex, "missing index after @elem in '" + std::string(pathinfo) + "'");
        }
        std::string_view digits = tokens[++i];
        std::size_t index = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
        if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
          throw Error(ErrorCode::BadIndex, "invalid element index '" + std::string(digits) + "'");
        }
        path.segments_.push_back({Segment::Kind::Meta, {}, Meta::Elem, 0});
        path.segments_.push_back({Segment::Kind::Index, {}, {}, index});
        continue;
      }
      if (i + 1 != tokens.size()) {
        throw Error(ErrorCode::NotFound, std::string(token) + " must be the last path segment");
      }
      path.segments_.push_back({Segment::Kind::Meta, {}, *meta, 0});
      continue;
    }
    if (!is_valid_name(token)) {
      throw Error(ErrorCode::NotFound, "no endpoint '" + std::string(pathinfo) + "'");
    }
    path.segments_.push_back({Segment::Kind::Name, std::string(token), {}, 0});
  }
  return path;
}

std::optional<Meta> Path::trailing_meta() const {
  if (segments_.empty()) return std::nullopt;
  const auto& last = segments_.back();
  if (last.kind == Segment::Kind::Meta && last.meta != Meta::Elem) return last.meta;
  return std::nullopt;
}

Path Path::without_meta() const {
  Path p = *this;
  if (trailing_meta()) p.segments_.pop_back();
  return p;
}

Path Path::child(std::string name) const {
  Path p = *this;
  p.segments_.push_back({Segment::Kind::Name, std::move(name), {}, 0});
  return p;
}

std::string Path::str() const {
  if (segments_.empty()) return "/";
  std::string out;
  for (const auto& s : segments_) {
    out += '/';
    switch (s.kind) {
      case Segment::Kind::Name: out += s.name; break;
      case Segment::Kind::Meta: out += to_string(s.meta); break;
      case Segment::Kind::Index: out += std::to_string(s.index); break;
    }
  }
  return out;
}

// ---- Handler defaults -------------------------------------------------------

HandlerPtr Handler::child(std::string_view) const { return nullptr; }

HandlerPtr Handler::element(std::size_t) const {
  throw Error(ErrorCode::NotFound, "@elem applied to a " + type() + " endpoint");
}

Value Handler::read() const {
  throw Error(ErrorCode::Internal, "endpoint of type " + type() + " carries no data");
}

void Handler::assign(const Value&) {
  throw Error(ErrorCode::MalformedInput, "endpoint of type " + type() + " cannot be assigned");
}

std::vector<Value> normalize_args(const std::optional<Value>& body) {
  if (!body) return {};
  if (body->is_array()) return body->as_array();
  return {*body};
}

// ---- AttributeHandler -------------------------------------------------------

AttributeHandler::AttributeHandler(ParamType type, Getter get, Setter set)
    : type_(std::move(type)), get_(std::move(get)), set_(std::move(set)) {}

OverloadSet AttributeHandler::accessors() const {
  std::vector<Overload> overloads;
  overloads.push_back({Signature{type_, {}}, [this](std::span<const Value>) { return get_(); }});
  if (set_) {
    overloads.push_back({Signature{type_, {type_}}, [this](std::span<const Value> args) {
                           set_(args[0]);
                           return get_();
                         }});
  }
  return OverloadSet("attribute", std::move(overloads));
}

Value AttributeHandler::process(const std::optional<Value>& body) {
  if (!body) return get_();
  auto args = normalize_args(body);
  if (!set_ && !args.empty()) throw Error(ErrorCode::MalformedInput, "attribute is read-only");
  try {
    return resolve_and_call(accessors(), args, body->is_array() ? &*body : nullptr);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoMatch) throw;
    throw Error(ErrorCode::MalformedInput,
                "cannot assign " + serialize(*body) + " to attribute of type " + type_.tag());
  }
}

Value AttributeHandler::signature() const {
  Array sigs;
  for (const auto& s : accessors().signatures()) sigs.push_back(s.to_value());
  return Value(std::move(sigs));
}

Value AttributeHandler::list() const { return Value(Array{}); }

void AttributeHandler::assign(const Value& value) {
  if (!set_) {
    if (value == get_()) return;
    throw Error(ErrorCode::MalformedInput, "attribute is read-only");
  }
  if (!arg_penalty(type_, value).finite()) {
    throw Error(ErrorCode::MalformedInput,
                "cannot assign " + serialize(value) + " to attribute of type " + type_.tag());
  }
  set_(convert(type_, value));
}

// ---- MethodHandler ----------------------------------------------------------

Value MethodHandler::process(const std::optional<Value>& body) {
  auto args = normalize_args(body);
  const Value* array_body = body && body->is_array() ? &*body : nullptr;
  return resolve_and_call(overloads_, args, array_body);
}

Value MethodHandler::signature() const {
  Array sigs;
  for (const auto& o : overloads_.overloads()) sigs.push_back(o.signature.to_value());
  return Value(std::move(sigs));
}

// ---- ContainerHandler -------------------------------------------------------

ContainerHandler::ContainerHandler(std::string element_type, Size size, Element element)
    : element_type_(std::move(element_type)), size_(std::move(size)), element_(std::move(element)) {}

Value ContainerHandler::process(const std::optional<Value>& body) {
  if (body) assign(*body);
  return read();
}

Value ContainerHandler::signature() const {
  throw Error(ErrorCode::NoMatch, "container endpoint has no signature");
}

Value ContainerHandler::list() const { return Value(Array{Value("@elem")}); }

HandlerPtr ContainerHandler::element(std::size_t index) const {
  std::size_t n = size_();
  if (index >= n) {
    throw Error(ErrorCode::BadIndex,
                "index " + std::to_string(index) + " out of range for size " + std::to_string(n));
  }
  return element_(index);
}

Value ContainerHandler::read() const {
  Array out;
  std::size_t n = size_();
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(element_(i)->read());
  return Value(std::move(out));
}

void ContainerHandler::assign(const Value& value) {
  std::size_t n = size_();
  if (!value.is_array() || value.as_array().size() != n) {
    throw Error(ErrorCode::MalformedInput,
                "container of size " + std::to_string(n) + " needs an array of the same length");
  }
  for (std::size_t i = 0; i < n; ++i) element_(i)->assign(value.as_array()[i]);
}

// ---- NodeHandler ------------------------------------------------------------

NodeHandler::NodeHandler(TypeDescriptor descriptor, ChildMap children)
    : descriptor_(std::move(descriptor)) {
  for (auto& [name, handler] : children) add_child(name, std::move(handler));
}

void NodeHandler::add_child(std::string name, HandlerPtr handler) {
  if (!is_valid_name(name)) {
    throw Error(ErrorCode::MalformedInput, "invalid endpoint name '" + name + "'");
  }
  if (children_.contains(name)) {
    throw Error(ErrorCode::DuplicateName, "endpoint '" + name + "' already registered");
  }
  children_.emplace(std::move(name), std::move(handler));
}

HandlerPtr NodeHandler::child(std::string_view name) const {
  auto it = children_.find(name);
  return it == children_.end() ? nullptr : it->second;
}

Value NodeHandler::process(const std::optional<Value>& body) {
  if (!body) return read();
  Value snapshot = read();
  try {
    assign(*body);
  } catch (...) {
    try {
      assign(snapshot);
    } catch (...) {
    }
    throw;
  }
  return read();
}

Value NodeHandler::signature() const {
  throw Error(ErrorCode::NoMatch, "object endpoint of type " + descriptor_.name + " is not callable");
}

Value NodeHandler::list() const {
  Array names;
  for (const auto& [name, handler] : children_) names.emplace_back(name);
  return Value(std::move(names));
}

Value NodeHandler::read() const {
  Object out;
  for (const auto& [name, handler] : children_) {
    if (handler->is_data()) out.insert(name, handler->read());
  }
  return Value(std::move(out));
}

void NodeHandler::assign(const Value& value) {
  if (!value.is_object()) {
    throw Error(ErrorCode::MalformedInput,
                "object of type " + descriptor_.name + " needs an object body");
  }
  for (const auto& [key, v] : value.as_object()) {
    auto h = child(key);
    if (!h || !h->is_data()) {
      throw Error(ErrorCode::MalformedInput,
                  "type " + descriptor_.name + " has no attribute '" + key + "'");
    }
  }
  for (const auto& [key, v] : value.as_object()) child(key)->assign(v);
}

// ---- Response ---------------------------------------------------------------

Response Response::error(ErrorCode code, std::string message) {
  return Response(Failure{wire_code(code), std::move(message)});
}

Response Response::from_exception(const std::exception& e) {
  if (auto* err = dynamic_cast<const Error*>(&e)) return error(err->code(), err->what());
  return error(ErrorCode::Internal, e.what());
}

const Value& Response::value() const {
  if (auto* v = std::get_if<Value>(&data_)) return *v;
  throw Error(ErrorCode::Internal, "value() on error response: " + message());
}

ErrorCode Response::code() const {
  if (auto* f = std::get_if<Failure>(&data_)) return f->code;
  throw Error(ErrorCode::Internal, "code() on ok response");
}

const std::string& Response::message() const {
  if (auto* f = std::get_if<Failure>(&data_)) return f->message;
  throw Error(ErrorCode::Internal, "message() on ok response");
}

Value Response::to_value() const {
  if (is_ok()) return value();
  return Value(Object{{"error", std::string(to_string(code()))}, {"message", message()}});
}

// ---- Registry ---------------------------------------------------------------

Registry::Registry() {
  TypeDescriptor root;
  root.name = "Registry";
  root_ = std::make_shared<NodeHandler>(std::move(root), ChildMap{});
}

HandlerPtr Registry::resolve(const Path& path) const {
  HandlerPtr current = root_;
  const auto& segs = path.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& s = segs[i];
    switch (s.kind) {
      case Segment::Kind::Name:
        current = current->child(s.name);
        if (!current) throw Error(ErrorCode::NotFound, "no endpoint '" + path.str() + "'");
        break;
      case Segment::Kind::Meta:
        if (s.meta != Meta::Elem || i + 1 >= segs.size() ||
            segs[i + 1].kind != Segment::Kind::Index) {
          throw Error(ErrorCode::NotFound, "no endpoint '" + path.str() + "'");
        }
        current = current->element(segs[++i].index);
        break;
      case Segment::Kind::Index:
        throw Error(ErrorCode::NotFound, "no endpoint '" + path.str() + "'");
    }
  }
  return current;
}

Response Registry::introspect(const Path& path, Meta meta) const {
  try {
    auto handler = resolve(path);
    switch (meta) {
      case Meta::List: return Response::ok(handler->list());
      case Meta::Type: return Response::ok(Value(handler->type()));
      case Meta::Signature: return Response::ok(handler->signature());
      case Meta::Elem: break;
    }
    return Response::error(ErrorCode::NotFound, "no endpoint '" + path.str() + "'");
  } catch (const std::exception& e) {
    return Response::from_exception(e);
  }
}

Response Registry::process(const Request& request) {
  std::lock_guard lock(mutex_);
  if (auto meta = request.path.trailing_meta()) {
    return introspect(request.path.without_meta(), *meta);
  }
  try {
    return Response::ok(resolve(request.path)->process(request.body));
  } catch (const std::exception& e) {
    return Response::from_exception(e);
  }
}

Response Registry::process(std::string_view pathinfo, std::optional<Value> body) {
  Request request;
  try {
    request.path = Path::parse(pathinfo);
  } catch (const std::exception& e) {
    return Response::from_exception(e);
  }
  request.body = std::move(body);
  return process(request);
}

Response Registry::list(const Path& path) const {
  std::lock_guard lock(mutex_);
  return introspect(path, Meta::List);
}

Response Registry::type_of(const Path& path) const {
  std::lock_guard lock(mutex_);
  return introspect(path, Meta::Type);
}

Response Registry::signature_of(const Path& path) const {
  std::lock_guard lock(mutex_);
  return introspect(path, Meta::Signature);
}

void Registry::register_handler(const Path& parent, std::string name, HandlerPtr handler) {
  std::lock_guard lock(mutex_);
  auto node = std::dynamic_pointer_cast<NodeHandler>(resolve(parent));
  if (!node) throw Error(ErrorCode::NotFound, "'" + parent.str() + "' is not an object endpoint");
  node->add_child(std::move(name), std::move(handler));
}

void Registry::register_node(const Path& parent, std::string name, TypeDescriptor descriptor,
                             ChildMap children) {
  auto type_name = descriptor.name;
  auto node = std::make_shared<NodeHandler>(descriptor, std::move(children));
  register_handler(parent, name, std::move(node));
  add_type(std::move(descriptor));
  if (parent.empty()) {
    std::lock_guard lock(mutex_);
    roots_[name] = type_name;
  }
}

void Registry::add_type(TypeDescriptor descriptor) {
  std::lock_guard lock(mutex_);
  auto it = types_.find(descriptor.name);
  if (it == types_.end()) {
    types_.emplace(descriptor.name, std::move(descriptor));
  } else if (!(it->second == descriptor)) {
    throw Error(ErrorCode::DuplicateName,
                "conflicting descriptors for type '" + descriptor.name + "'");
  }
}

}  // namespace fatgate
