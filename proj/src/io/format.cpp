#include "edfm/io/format.hpp"

#include <cstdio>

namespace edfm::io {

std::string fmt_real(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

}  // namespace edfm::io
