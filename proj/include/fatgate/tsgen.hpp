#pragma once

// TypeScript client bindings generated from registered type descriptors.
//
// Each type becomes a proxy class over a dotted prefix ("model.group");
// the runtime maps the prefix onto the endpoint path ("/model/group").
// Scalar attributes become merged getter/setter methods, nested objects
// become child proxy fields, containers become Sequence<T> fields and
// methods become async wrappers around $callMethod.

#include <map>
#include <string>
#include <vector>

#include "fatgate/registry.hpp"

namespace fatgate::tsgen {

struct EmitPlan {
  /// Supertypes and referenced types precede the types that use them.
  std::vector<TypeDescriptor> types;
  /// Global instance name -> type name.
  std::map<std::string, std::string> roots;
};

/// Orders `types` for emission. Ties are broken by name so the result
/// does not depend on input order. Throws Error(UnknownType) for a
/// reference to an unlisted, non-primitive type and Error(CycleDetected)
/// when no order exists.
EmitPlan make_plan(const std::vector<TypeDescriptor>& types,
                   const std::map<std::string, std::string>& roots);
EmitPlan make_plan(const Registry& registry);

/// The fixed runtime: CppClass, Sequence, the Transport interface and its
/// HTTP implementation.
std::string emit_runtime();

/// emit_runtime() followed by one class per planned type and one global
/// per root instance. Re-checks the plan's ordering and references.
std::string emit(const EmitPlan& plan);

/// TypeScript spelling of a parameter or attribute type.
std::string ts_type(const ParamType& type);

}  // namespace fatgate::tsgen
