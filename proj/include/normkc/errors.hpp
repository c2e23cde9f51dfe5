#pragma once

#include <stdexcept>
#include <string>

namespace normkc {

// Malformed user input: bad files, bad flags, dimension mismatches.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation not defined for this space variant (e.g. enumerating centers
// of a continuous space).
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace normkc
