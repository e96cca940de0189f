#pragma once

// Declarative reflection of C++ classes into registry handlers.
//
//   Class<Model> model("Model");
//   model.attribute("t", &Model::t)
//        .object("group", &Model::group, group)
//        .method("step", [](Model& m) { return m.step(); },
//                        [](Model& m, int n) { return m.step(n); });
//   model.expose(registry, Path{}, "model", instance);
//
// A Class is a value: nesting one inside another copies it, so build
// children (and register subclasses with derived()) before using them.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "fatgate/binding.hpp"
#include "fatgate/registry.hpp"

namespace fatgate {

namespace detail {

template <class E>
decltype(auto) deref(E& e) {
  if constexpr (requires { *e; }) {
    return *e;
  } else {
    return (e);
  }
}

}  // namespace detail

template <class T>
class Class {
 public:
  using NodeFactory = std::function<std::shared_ptr<NodeHandler>(T&)>;

  explicit Class(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

  /// Read/write attribute bound to a data member.
  template <class U>
  Class& attribute(std::string name, U T::*member) {
    attributes_.insert_or_assign(name, param_type_of<U>());
    ParamType type = param_type_of<U>();
    own_.push_back({std::move(name), [member, type](T& obj) -> HandlerPtr {
                      return std::make_shared<AttributeHandler>(
                          type, [&obj, member] { return ValueTraits<U>::to_value(obj.*member); },
                          [&obj, member](const Value& v) { obj.*member = ValueTraits<U>::from_value(v); });
                    }});
    return *this;
  }

  /// Attribute with accessor functions: `get(const T&) -> U`,
  /// `set(T&, U)`. The setter may throw Error(MalformedInput) to reject a
  /// value.
  template <class Get, class Set>
  Class& attribute(std::string name, Get get, Set set) {
    using U = bare_t<std::invoke_result_t<Get, const T&>>;
    attributes_.insert_or_assign(name, param_type_of<U>());
    ParamType type = param_type_of<U>();
    own_.push_back({std::move(name), [get, set, type](T& obj) -> HandlerPtr {
                      return std::make_shared<AttributeHandler>(
                          type, [&obj, get] { return ValueTraits<U>::to_value(get(obj)); },
                          [&obj, set](const Value& v) { set(obj, ValueTraits<U>::from_value(v)); });
                    }});
    return *this;
  }

  template <class Get>
  Class& readonly(std::string name, Get get) {
    using U = bare_t<std::invoke_result_t<Get, const T&>>;
    attributes_.insert_or_assign(name, param_type_of<U>());
    ParamType type = param_type_of<U>();
    own_.push_back({std::move(name), [get, type](T& obj) -> HandlerPtr {
                      return std::make_shared<AttributeHandler>(
                          type, [&obj, get] { return ValueTraits<U>::to_value(get(obj)); }, nullptr);
                    }});
    return *this;
  }

  /// Nested object exposed as a child node.
  template <class U>
  Class& object(std::string name, U T::*member, const Class<U>& cls) {
    attributes_.insert_or_assign(name, ParamType::object_like(cls.name()));
    absorb(cls.descriptors());
    own_.push_back({std::move(name), [member, make = cls.node_factory()](T& obj) -> HandlerPtr {
                      return make(obj.*member);
                    }});
    return *this;
  }

  /// Sequence of objects (held by value or by pointer) exposed as a
  /// container; elements are built on access so the sequence may change.
  template <class C, class U>
  Class& container(std::string name, C T::*member, const Class<U>& cls) {
    attributes_.insert_or_assign(name, ParamType::sequence(ParamType::object_like(cls.name())));
    absorb(cls.descriptors());
    own_.push_back(
        {std::move(name), [member, make = cls.node_factory(), type = cls.name()](T& obj) -> HandlerPtr {
           C& seq = obj.*member;
           return std::make_shared<ContainerHandler>(
               type, [&seq] { return seq.size(); },
               [&seq, make](std::size_t i) -> HandlerPtr {
                 U& element = detail::deref(seq[i]);
                 return make(element);
               });
         }});
    return *this;
  }

  /// Overload set. Each callable takes `T&` (or `const T&`) followed by
  /// the method's parameters; member function pointers work too.
  template <class... Fns>
  Class& method(std::string name, Fns&&... overloads) {
    static_assert(sizeof...(Fns) > 0, "a method needs at least one overload");
    std::vector<std::function<Overload(T&)>> makers;
    std::vector<Signature> sigs;
    (add_overload(makers, sigs, as_function(std::forward<Fns>(overloads))), ...);
    methods_[name] = sigs;
    OverloadSet(name, [&] {
      // validate distinct parameter lists up front
      std::vector<Overload> probe;
      for (auto& s : sigs) probe.push_back({s, nullptr});
      return probe;
    }());
    own_.push_back({name, [name, makers](T& obj) -> HandlerPtr {
                      std::vector<Overload> bound;
                      bound.reserve(makers.size());
                      for (const auto& m : makers) bound.push_back(m(obj));
                      return std::make_shared<MethodHandler>(OverloadSet(name, std::move(bound)));
                    }});
    return *this;
  }

  /// Inherit the members of `base`. Own members shadow inherited ones.
  template <class Base>
  Class& extends(const Class<Base>& base) {
    static_assert(std::is_base_of_v<Base, T>);
    supertype_ = base.name();
    absorb(base.descriptors());
    for (const auto& m : base.all_members()) {
      inherited_.push_back({m.name, [make = m.make](T& obj) -> HandlerPtr {
                              return make(static_cast<Base&>(obj));
                            }});
    }
    return *this;
  }

  /// Register a subclass for dynamic dispatch: node() on a T whose dynamic
  /// type is Derived yields Derived's endpoints.
  template <class Derived>
  Class& derived(const Class<Derived>& sub) {
    static_assert(std::is_polymorphic_v<T> && std::is_base_of_v<T, Derived>);
    polymorphic_ = true;
    std::vector<TypeDescriptor> theirs;
    for (auto& d : sub.descriptors()) {
      if (d.name != name_) theirs.push_back(std::move(d));
    }
    absorb(std::move(theirs));
    derived_.push_back([make = sub.node_factory()](T& obj) -> std::shared_ptr<NodeHandler> {
      if (auto* d = dynamic_cast<Derived*>(&obj)) return make(*d);
      return nullptr;
    });
    return *this;
  }

  std::shared_ptr<NodeHandler> node(T& obj) const {
    for (const auto& d : derived_) {
      if (auto n = d(obj)) return n;
    }
    ChildMap children;
    for (const auto& m : own_) {
      if (!children.emplace(m.name, m.make(obj)).second) {
        throw Error(ErrorCode::DuplicateName, name_ + " declares '" + m.name + "' twice");
      }
    }
    for (const auto& m : inherited_) children.try_emplace(m.name, m.make(obj));
    return std::make_shared<NodeHandler>(descriptor(), std::move(children));
  }

  NodeFactory node_factory() const {
    return [self = *this](T& obj) { return self.node(obj); };
  }

  TypeDescriptor descriptor() const {
    return TypeDescriptor{name_, supertype_, attributes_, methods_, polymorphic_};
  }

  /// This type first, then every type reachable from it.
  std::vector<TypeDescriptor> descriptors() const {
    std::vector<TypeDescriptor> out{descriptor()};
    for (const auto& d : reachable_) {
      bool seen = false;
      for (const auto& o : out) seen = seen || o.name == d.name;
      if (!seen) out.push_back(d);
    }
    return out;
  }

  /// Registers obj under `parent` and records every reachable type.
  void expose(Registry& registry, const Path& parent, std::string name, T& obj) const {
    auto n = node(obj);
    registry.register_node(parent, std::move(name), n->descriptor(), n->children());
    for (auto& d : descriptors()) registry.add_type(std::move(d));
  }

  struct Member {
    std::string name;
    std::function<HandlerPtr(T&)> make;
  };

  std::vector<Member> all_members() const {
    std::vector<Member> out = own_;
    out.insert(out.end(), inherited_.begin(), inherited_.end());
    return out;
  }

 private:
  template <class Fn>
  static auto as_function(Fn&& fn) {
    if constexpr (std::is_member_function_pointer_v<std::remove_cvref_t<Fn>>) {
      return member_function(fn);
    } else {
      return std::function(std::forward<Fn>(fn));
    }
  }

  template <class R, class... Args>
  static std::function<R(T&, Args...)> member_function(R (T::*pm)(Args...)) {
    return pm;
  }

  template <class R, class... Args>
  static std::function<R(const T&, Args...)> member_function(R (T::*pm)(Args...) const) {
    return pm;
  }

  template <class R, class Self, class... Args>
  static void add_overload(std::vector<std::function<Overload(T&)>>& makers,
                           std::vector<Signature>& sigs, std::function<R(Self, Args...)> fn) {
    static_assert(std::is_same_v<bare_t<Self>, T> && std::is_reference_v<Self>,
                  "overloads take the object by reference as their first parameter");
    sigs.push_back(Signature{result_type_of<R>(), {param_type_of<Args>()...}});
    makers.push_back([fn](T& obj) {
      return detail::make_overload(std::function<R(Args...)>(
          [fn, &obj](Args... args) -> R { return fn(obj, std::forward<Args>(args)...); }));
    });
  }

  void absorb(std::vector<TypeDescriptor> found) {
    for (auto& d : found) reachable_.push_back(std::move(d));
  }

  std::string name_;
  std::optional<std::string> supertype_;
  std::map<std::string, ParamType> attributes_;
  std::map<std::string, std::vector<Signature>> methods_;
  bool polymorphic_ = false;
  std::vector<Member> own_;
  std::vector<Member> inherited_;
  std::vector<std::function<std::shared_ptr<NodeHandler>(T&)>> derived_;
  std::vector<TypeDescriptor> reachable_;
};

}  // namespace fatgate
