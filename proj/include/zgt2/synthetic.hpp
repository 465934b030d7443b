#pragma once

#include <cstdint>

#include "zgt2/data.hpp"

namespace zgt2 {

/// One input x ~ U(-4, 4) and y = sin(x) + 0.15 |x| e with e ~ N(0, 1):
/// noise grows with |x|.
Table make_heteroscedastic_sine(std::size_t n, std::uint64_t seed);

}  // namespace zgt2
