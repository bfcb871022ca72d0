#include "tgquench/text_format.hpp"

#include <cmath>
#include <cstdio>

namespace tgq {

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_row(std::ostream& os, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ' ';
    os << format_number(values[i]);
  }
  os << '\n';
}

}  // namespace tgq
