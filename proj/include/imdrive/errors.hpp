#pragma once

#include <stdexcept>

namespace imdrive {

// Caller passed non-finite or structurally invalid data.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Machine or gain parameters violate their consistency constraints.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed scenario configuration: bad types, unknown keys, bad values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The controller was fed signals it cannot act on (NaN/Inf feedback).
struct ControllerFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace imdrive
