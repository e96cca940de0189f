#include "fatgate/demo_model.hpp"

#include <charconv>
#include <array>
#include <fstream>
#include <stdexcept>

#include "fatgate/reflect.hpp"

namespace fatgate::demo {

namespace {

std::string format_number(double d) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  return std::string(buf.data(), ptr);
}

}  // namespace

std::string Variable::describe() const { return "Variable " + name + " = " + format_number(value); }

std::string Operation::describe() const { return "Operation " + op; }

int Group::addVariable(const std::string& var_name, double value) {
  items.push_back(std::make_unique<Variable>(var_name, value));
  return numItems() - 1;
}

int Group::addOperation(const std::string& op) {
  items.push_back(std::make_unique<Operation>(op));
  return numItems() - 1;
}

void Group::removeItem(int index) {
  if (index < 0 || index >= numItems()) {
    throw std::out_of_range("no item at index " + std::to_string(index));
  }
  items.erase(items.begin() + index);
}

void Model::set_dt(double dt) {
  if (!(dt > 0)) throw Error(ErrorCode::MalformedInput, "dt must be positive");
  dt_ = dt;
}

double Model::step(int n) {
  if (n < 1) throw std::invalid_argument("step count must be at least 1, got " + std::to_string(n));
  t += n * dt_;
  return t;
}

void Model::exportEquations(const std::string& path, bool wrap) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  auto emit = [&](const std::string& line) {
    if (!wrap || line.size() <= kWrapColumns) {
      out << line << '\n';
      return;
    }
    for (std::size_t at = 0; at < line.size(); at += kWrapColumns) {
      out << line.substr(at, kWrapColumns) << '\n';
    }
  };
  emit("# equations");
  for (const auto& item : group.items) emit(item->describe());
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string Model::classifyOp(const std::string& name) const {
  if (name == "add" || name == "subtract") return "binary";
  if (name == "sin" || name == "cos") return "function";
  return "unknown";
}

void expose(Registry& registry, Model& model, const std::string& name) {
  Class<Item> item("Item");
  item.method("describe", &Item::describe);

  Class<Variable> variable("Variable");
  variable.extends(item).attribute("name", &Variable::name).attribute("value", &Variable::value);

  Class<Operation> operation("Operation");
  operation.extends(item).attribute("op", &Operation::op);

  item.derived(variable).derived(operation);

  Class<Group> group("Group");
  group.attribute("name", &Group::name)
      .container("items", &Group::items, item)
      .method("numItems", &Group::numItems)
      .method("addVariable", &Group::addVariable)
      .method("addOperation", &Group::addOperation)
      .method("removeItem", &Group::removeItem);

  Class<Model> cls("Model");
  cls.attribute("t", &Model::t)
      .attribute(
          "dt", [](const Model& m) { return m.dt(); }, [](Model& m, double v) { m.set_dt(v); })
      .object("group", &Model::group, group)
      .method("reset", &Model::reset)
      .method("step", [](Model& m) { return m.step(); }, [](Model& m, int n) { return m.step(n); })
      .method("exportEquations", &Model::exportEquations)
      .method("classifyOp", &Model::classifyOp);

  cls.expose(registry, Path{}, name, model);
}

}  // namespace fatgate::demo
