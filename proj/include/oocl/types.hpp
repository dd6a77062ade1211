#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace oocl {

enum class Family { gaussian, binomial };
enum class LambdaSpacing { linear, log };
enum class ScreenPolicy { none, ssr, bedpp, hybrid };

/// Per-column keep flags (1 = kept).
using Mask = std::vector<std::uint8_t>;

std::string_view to_string(Family f);
std::string_view to_string(LambdaSpacing s);
std::string_view to_string(ScreenPolicy p);

/// RangeError on unknown names.
Family parse_family(std::string_view s);
LambdaSpacing parse_spacing(std::string_view s);
ScreenPolicy parse_policy(std::string_view s);

}  // namespace oocl
