#pragma once

#include <ostream>

namespace fatgate::cli {

/// Entry point of the `fatgate` tool:
///
///   fatgate serve [--host H] [--port P]
///   fatgate emit-ts --out FILE
///   fatgate call PATH [BODY_JSON]
///   fatgate introspect PATH {list|type|signature}
///
/// Returns the process exit status: 0 success, 1 failed call or I/O
/// error, 2 usage error. `FATGATE_PORT` overrides the default port.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fatgate::cli
