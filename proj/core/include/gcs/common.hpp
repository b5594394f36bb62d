#pragma once

#include <stdexcept>
#include <string>

namespace gcs {

// Contract check for caller-supplied arguments and file contents.
inline void require(bool condition, const std::string& what) {
  if (!condition) throw std::invalid_argument(what);
}

}  // namespace gcs
