#pragma once

// A small systems-dynamics style object tree used as the reference surface
// for the gateway: a scalar clock, a nested group and a polymorphic item
// container.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fatgate/registry.hpp"

namespace fatgate::demo {

struct Item {
  virtual ~Item() = default;
  virtual std::string type_name() const = 0;
  /// One line of the equation listing.
  virtual std::string describe() const = 0;
};

struct Variable : Item {
  std::string name;
  double value = 0;

  Variable() = default;
  Variable(std::string n, double v) : name(std::move(n)), value(v) {}
  std::string type_name() const override { return "Variable"; }
  std::string describe() const override;
};

struct Operation : Item {
  std::string op;

  Operation() = default;
  explicit Operation(std::string o) : op(std::move(o)) {}
  std::string type_name() const override { return "Operation"; }
  std::string describe() const override;
};

struct Group {
  std::string name = "root";
  std::vector<std::unique_ptr<Item>> items;

  int numItems() const { return static_cast<int>(items.size()); }
  /// Returns the new item's index.
  int addVariable(const std::string& var_name, double value);
  int addOperation(const std::string& op);
  /// Throws std::out_of_range for a bad index.
  void removeItem(int index);
};

class Model {
 public:
  static constexpr double kDefaultDt = 0.1;

  double t = 0;
  Group group;

  double dt() const { return dt_; }
  /// Throws Error(MalformedInput) unless dt > 0.
  void set_dt(double dt);

  void reset() { t = 0; }
  double step() { return step(1); }
  /// Throws std::invalid_argument if n < 1.
  double step(int n);
  /// `# equations` followed by one line per item; with `wrap`, no line
  /// exceeds 80 columns. Throws std::runtime_error on I/O failure.
  void exportEquations(const std::string& path, bool wrap) const;
  std::string classifyOp(const std::string& name) const;

 private:
  double dt_ = kDefaultDt;
};

inline constexpr std::size_t kWrapColumns = 80;

/// Registers `model` at the registry root under `name`, together with its
/// types.
void expose(Registry& registry, Model& model, const std::string& name = "model");

}  // namespace fatgate::demo
