#pragma once

#include <stdexcept>

namespace credsim {

// Bad scenario/configuration input. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal simulator invariant violation. CLI maps this to exit code 2.
struct SimError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace credsim
