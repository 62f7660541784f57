#include "dlf/format.hpp"

#include <array>
#include <charconv>

namespace dlf {

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

}  // namespace dlf
