#pragma once

// Helpers shared by the unit tests and the acceptance suite.

#include <functional>
#include <string>
#include <vector>

#include "fatgate/registry.hpp"

namespace support {

inline std::string join(const std::string& base, const std::string& name) {
  return base == "/" ? "/" + name : base + "/" + name;
}

/// Every endpoint reachable from the root by following @list, with
/// containers expanded into their elements. Stops descending (and reports
/// the path through `broken`) when a listing fails.
inline std::vector<std::string> all_endpoints(fatgate::Registry& r,
                                              std::vector<std::string>* broken = nullptr) {
  std::vector<std::string> out;
  std::function<void(const std::string&)> walk = [&](const std::string& path) {
    out.push_back(path);
    fatgate::Response names = r.process(join(path, "@list"));
    if (!names.is_ok()) {
      if (broken) broken->push_back(path);
      return;
    }
    for (const auto& n : names.value().as_array()) {
      if (n.as_string() == "@elem") {
        std::size_t size = r.process(path).value().as_array().size();
        for (std::size_t i = 0; i < size; ++i) walk(join(path, "@elem/" + std::to_string(i)));
      } else {
        walk(join(path, n.as_string()));
      }
    }
  };
  walk("/");
  return out;
}

}  // namespace support
