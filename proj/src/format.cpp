#include "stablewalk/format.hpp"

#include <array>
#include <charconv>

namespace stablewalk {

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

} // namespace stablewalk
