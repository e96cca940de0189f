#include "fatgate/tsgen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace fatgate::tsgen {

namespace {

constexpr const char* kRuntime = R"ts(// Generated by fatgate. Do not edit.

/** Moves one request to the service and back. */
export interface Transport {
  send(path: string, body?: string): Promise<any>;
  sendSync(path: string, body?: string): any;
}

/** A call the service rejected; `code` is the service error code. */
export class RemoteError extends Error {
  readonly code: string;
  readonly status: number;
  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = 'RemoteError';
    this.code = code;
    this.status = status;
  }
}

function decodeReply(status: number, text: string): any {
  let data: any = null;
  try {
    data = text.length > 0 ? JSON.parse(text) : null;
  } catch (e) {
    throw new RemoteError('MalformedInput', 'unreadable reply: ' + text, status);
  }
  if (status >= 400) {
    const described = data !== null && typeof data === 'object';
    const code = described && typeof data.error === 'string' ? data.error : 'Internal';
    const message = described && typeof data.message === 'string' ? data.message : text;
    throw new RemoteError(code, message, status);
  }
  return data;
}

export class HttpTransport implements Transport {
  readonly baseUrl: string;
  constructor(baseUrl: string) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
  }
  async send(path: string, body?: string): Promise<any> {
    const init: {method: string; headers?: Record<string, string>; body?: string} =
      {method: body === undefined ? 'GET' : 'POST'};
    if (body !== undefined) {
      init.headers = {'Content-Type': 'application/json'};
      init.body = body;
    }
    const reply = await fetch(this.baseUrl + encodeURI(path), init);
    return decodeReply(reply.status, await reply.text());
  }
  sendSync(path: string, body?: string): any {
    const Xhr = (globalThis as any).XMLHttpRequest;
    if (typeof Xhr !== 'function') {
      throw new RemoteError('Unsupported',
        'synchronous calls need a host with synchronous XMLHttpRequest', 0);
    }
    const xhr = new Xhr();
    xhr.open(body === undefined ? 'GET' : 'POST', this.baseUrl + encodeURI(path), false);
    if (body !== undefined) xhr.setRequestHeader('Content-Type', 'application/json');
    xhr.send(body === undefined ? null : body);
    return decodeReply(xhr.status, xhr.responseText);
  }
}

/** Base of every generated proxy. All runtime members start with `$`. */
export class CppClass {
  static $defaultTransport: Transport = new HttpTransport('http://127.0.0.1:8080');
  private readonly $prefixText: string;
  protected readonly $tx: Transport | undefined;

  /** Pass a prefix such as 'model.group', or an existing proxy to view the
   *  same object through this (sub)class. */
  constructor(prefix: string | CppClass, transport?: Transport) {
    if (typeof prefix === 'string') {
      this.$prefixText = prefix;
      this.$tx = transport;
    } else {
      this.$prefixText = prefix.$prefix();
      this.$tx = transport ?? prefix.$tx;
    }
  }
  $prefix(): string {
    return this.$prefixText;
  }
  $transport(): Transport {
    return this.$tx ?? CppClass.$defaultTransport;
  }
  $path(member?: string): string {
    const parts = this.$prefixText.split('.');
    if (member !== undefined) parts.push(member);
    return '/' + parts.join('/');
  }
  static $encode(args: unknown[]): string | undefined {
    let n = args.length;
    while (n > 0 && args[n - 1] === undefined) --n;
    return n === 0 ? undefined : JSON.stringify(args.slice(0, n));
  }
  /** Resolves with the method's result or rejects with a RemoteError. */
  $callMethod(method: string, ...args: unknown[]): Promise<any> {
    return this.$transport().send(this.$path(method), CppClass.$encode(args));
  }
  /** Blocking variant; throws RemoteError('Unsupported') where the host
   *  cannot block. */
  $callMethodSync(method: string, ...args: unknown[]): any {
    return this.$transport().sendSync(this.$path(method), CppClass.$encode(args));
  }
  /** Without an argument, all public attributes; with one, assigns the
   *  given attributes and resolves with the updated object. */
  $properties(value?: object): Promise<any> {
    return this.$transport().send(this.$path(),
      value === undefined ? undefined : JSON.stringify(value));
  }
  $type(): Promise<string> {
    return this.$transport().send(this.$path('@type'));
  }
  $list(): Promise<string[]> {
    return this.$transport().send(this.$path('@list'));
  }
  $signature(member: string): Promise<{ret: string, args: string[]}[]> {
    return this.$transport().send(this.$path(member) + '/@signature');
  }
}

/** Container of proxies; `$elem(i)` addresses one element. */
export class Sequence<T extends CppClass> extends CppClass {
  private readonly $make: (prefix: string, transport?: Transport) => T;
  constructor(prefix: string | CppClass,
              make: (prefix: string, transport?: Transport) => T,
              transport?: Transport) {
    super(prefix, transport);
    this.$make = make;
  }
  $elem(index: number): T {
    return this.$make(this.$prefix() + '.@elem.' + index, this.$tx);
  }
  async $size(): Promise<number> {
    const all = await this.$properties();
    return Array.isArray(all) ? all.length : 0;
  }
}
)ts";

void collect(const ParamType& t, std::set<std::string>& out) {
  if (t.kind() == ParamKind::ObjectLike) out.insert(t.type_name());
  if (t.kind() == ParamKind::Sequence) collect(t.element(), out);
}

std::set<std::string> references(const TypeDescriptor& d) {
  std::set<std::string> refs;
  if (d.supertype) refs.insert(*d.supertype);
  for (const auto& [name, type] : d.attributes) collect(type, refs);
  for (const auto& [name, sigs] : d.methods) {
    for (const auto& s : sigs) {
      if (s.result) collect(*s.result, refs);
      for (const auto& p : s.params) collect(p, refs);
    }
  }
  return refs;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string union_of(const std::vector<std::string>& alternatives) {
  std::vector<std::string> distinct;
  for (const auto& a : alternatives) {
    if (std::find(distinct.begin(), distinct.end(), a) == distinct.end()) distinct.push_back(a);
  }
  std::sort(distinct.begin(), distinct.end());
  return join(distinct, " | ");
}

std::string result_ts(const Signature& s) { return s.result ? ts_type(*s.result) : "void"; }

void emit_method(std::ostream& out, const std::string& name, const std::vector<Signature>& sigs) {
  std::size_t max_arity = 0;
  std::size_t min_arity = sigs.empty() ? 0 : sigs.front().arity();
  for (const auto& s : sigs) {
    max_arity = std::max(max_arity, s.arity());
    min_arity = std::min(min_arity, s.arity());
  }
  std::vector<std::string> params;
  std::vector<std::string> args;
  for (std::size_t i = 0; i < max_arity; ++i) {
    std::vector<std::string> alternatives;
    for (const auto& s : sigs) {
      if (s.arity() > i) alternatives.push_back(ts_type(s.params[i]));
    }
    std::string arg = "a" + std::to_string(i + 1);
    params.push_back(arg + (i >= min_arity ? "?: " : ": ") + union_of(alternatives));
    args.push_back(arg);
  }
  std::vector<std::string> results;
  for (const auto& s : sigs) results.push_back(result_ts(s));
  out << "  async " << name << "(" << join(params, ", ") << "): Promise<" << union_of(results)
      << ">\n    {return this.$callMethod('" << name << "'";
  for (const auto& a : args) out << "," << a;
  out << ");}\n";
}

void emit_class(std::ostream& out, const TypeDescriptor& d) {
  out << "\nexport class " << d.name << " extends " << d.supertype.value_or("CppClass") << " {\n";
  std::vector<std::string> inits;
  for (const auto& [name, type] : d.attributes) {
    if (type.kind() == ParamKind::ObjectLike) {
      out << "  " << name << ": " << type.type_name() << ";\n";
      inits.push_back("this." + name + "=new " + type.type_name() + "(this.$prefix()+'." + name +
                      "', this.$tx);");
    } else if (type.kind() == ParamKind::Sequence && type.element().kind() == ParamKind::ObjectLike) {
      const auto& elem = type.element().type_name();
      out << "  " << name << ": Sequence<" << elem << ">;\n";
      inits.push_back("this." + name + "=new Sequence<" + elem + ">(this.$prefix()+'." + name +
                      "', (p, t) => new " + elem + "(p, t), this.$tx);");
    }
  }
  out << "  constructor(prefix: string | CppClass, transport?: Transport) {\n"
      << "    super(prefix, transport);\n";
  for (const auto& line : inits) out << "    " << line << "\n";
  out << "  }\n";
  for (const auto& [name, type] : d.attributes) {
    bool child_proxy = type.kind() == ParamKind::ObjectLike ||
                       (type.kind() == ParamKind::Sequence &&
                        type.element().kind() == ParamKind::ObjectLike);
    if (child_proxy) continue;
    std::string ts = ts_type(type);
    out << "  async " << name << "(...args: " << ts << "[]): Promise<" << ts << ">\n"
        << "    {return this.$callMethod('" << name << "',...args);}\n";
  }
  for (const auto& [name, sigs] : d.methods) emit_method(out, name, sigs);
  out << "}\n";
}

void check_names(const TypeDescriptor& d) {
  if (!is_valid_name(d.name)) throw Error(ErrorCode::MalformedInput, "invalid type name '" + d.name + "'");
  for (const auto& [name, type] : d.attributes) {
    if (!is_valid_name(name)) throw Error(ErrorCode::MalformedInput, "invalid attribute '" + name + "'");
  }
  for (const auto& [name, sigs] : d.methods) {
    if (!is_valid_name(name)) throw Error(ErrorCode::MalformedInput, "invalid method '" + name + "'");
  }
}

}  // namespace

std::string ts_type(const ParamType& type) {
  switch (type.kind()) {
    case ParamKind::IntLike:
    case ParamKind::FloatLike: return "number";
    case ParamKind::BoolLike: return "boolean";
    case ParamKind::StringLike: return "string";
    case ParamKind::Sequence: {
      std::string inner = ts_type(type.element());
      return inner.find(' ') == std::string::npos ? inner + "[]" : "(" + inner + ")[]";
    }
    case ParamKind::ObjectLike: return type.type_name();
  }
  return "unknown";
}

EmitPlan make_plan(const std::vector<TypeDescriptor>& types,
                   const std::map<std::string, std::string>& roots) {
  std::map<std::string, const TypeDescriptor*> by_name;
  for (const auto& d : types) {
    check_names(d);
    if (!by_name.emplace(d.name, &d).second) {
      throw Error(ErrorCode::DuplicateName, "type '" + d.name + "' listed twice");
    }
  }
  std::map<std::string, std::set<std::string>> pending;
  for (const auto& d : types) {
    auto refs = references(d);
    for (const auto& r : refs) {
      if (!by_name.contains(r)) {
        throw Error(ErrorCode::UnknownType, "type '" + d.name + "' references unknown type '" + r + "'");
      }
    }
    pending[d.name] = std::move(refs);
  }
  for (const auto& [global, type] : roots) {
    if (!by_name.contains(type)) {
      throw Error(ErrorCode::UnknownType, "root '" + global + "' has unknown type '" + type + "'");
    }
  }

  EmitPlan plan;
  plan.roots = roots;
  while (!pending.empty()) {
    // std::map iteration order makes the first ready name the smallest
    auto ready = std::find_if(pending.begin(), pending.end(),
                              [](const auto& entry) { return entry.second.empty(); });
    if (ready == pending.end()) {
      std::vector<std::string> stuck;
      for (const auto& [name, refs] : pending) stuck.push_back(name);
      throw Error(ErrorCode::CycleDetected, "type references form a cycle among: " + join(stuck, ", "));
    }
    std::string name = ready->first;
    pending.erase(ready);
    for (auto& [other, refs] : pending) refs.erase(name);
    plan.types.push_back(*by_name.at(name));
  }
  return plan;
}

EmitPlan make_plan(const Registry& registry) {
  std::vector<TypeDescriptor> types;
  for (const auto& [name, d] : registry.types()) types.push_back(d);
  return make_plan(types, registry.roots());
}

std::string emit_runtime() { return kRuntime; }

std::string emit(const EmitPlan& plan) {
  std::set<std::string> defined;
  std::set<std::string> all;
  for (const auto& d : plan.types) all.insert(d.name);
  for (const auto& d : plan.types) {
    check_names(d);
    for (const auto& r : references(d)) {
      if (!all.contains(r)) {
        throw Error(ErrorCode::UnknownType, "type '" + d.name + "' references unknown type '" + r + "'");
      }
      if (!defined.contains(r)) {
        throw Error(ErrorCode::CycleDetected,
                    "type '" + d.name + "' is emitted before its dependency '" + r + "'");
      }
    }
    if (!defined.insert(d.name).second) {
      throw Error(ErrorCode::DuplicateName, "type '" + d.name + "' planned twice");
    }
  }
  for (const auto& [global, type] : plan.roots) {
    if (!all.contains(type)) {
      throw Error(ErrorCode::UnknownType, "root '" + global + "' has unknown type '" + type + "'");
    }
  }

  std::ostringstream out;
  out << kRuntime;
  for (const auto& d : plan.types) emit_class(out, d);
  if (!plan.roots.empty()) out << "\n";
  for (const auto& [global, type] : plan.roots) {
    out << "export const " << global << " = new " << type << "('" << global << "');\n";
  }
  return out.str();
}

}  // namespace fatgate::tsgen
