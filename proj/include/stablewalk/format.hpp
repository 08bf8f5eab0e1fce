#pragma once

#include <string>

namespace stablewalk {

// Shortest decimal string that reads back to the same double ('.' decimal point).
std::string format_double(double v);

} // namespace stablewalk
