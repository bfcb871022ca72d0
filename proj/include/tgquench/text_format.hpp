#pragma once

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>

namespace tgq {

/// 12 significant digits, locale independent.
std::string format_number(double v);

void write_row(std::ostream& os, std::span<const double> values);
inline void write_row(std::ostream& os, std::initializer_list<double> values) {
  write_row(os, std::span<const double>(values.begin(), values.size()));
}

}  // namespace tgq
