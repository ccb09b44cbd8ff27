#pragma once

#include <stdexcept>
#include <string>

namespace epkit {

// Invalid argument or out-of-domain evaluation point.
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Statistic violates the existence condition 1 < K_n < n.
struct degeneracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A series tail bound exceeds the requested tolerance at the configured cutoff.
struct truncation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A rejection sampler exceeded its iteration cap.
struct sampling_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File or text input could not be parsed.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreachable-by-construction state; indicates a bug, not bad input.
struct internal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace epkit
