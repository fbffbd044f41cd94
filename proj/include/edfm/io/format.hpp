#pragma once

#include <string>

namespace edfm::io {

/// Fixed CSV float format: 17 significant digits, scientific notation.
std::string fmt_real(double v);

}  // namespace edfm::io
