#include "oocl/types.hpp"

#include <string>

#include "oocl/error.hpp"

namespace oocl {

std::string_view to_string(Family f) {
  return f == Family::gaussian ? "gaussian" : "binomial";
}

std::string_view to_string(LambdaSpacing s) {
  return s == LambdaSpacing::linear ? "linear" : "log";
}

std::string_view to_string(ScreenPolicy p) {
  switch (p) {
    case ScreenPolicy::none: return "none";
    case ScreenPolicy::ssr: return "ssr";
    case ScreenPolicy::bedpp: return "bedpp";
    case ScreenPolicy::hybrid: return "hybrid";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  if (s == "gaussian") return Family::gaussian;
  if (s == "binomial") return Family::binomial;
  throw RangeError("unknown family '" + std::string(s) + "'");
}

LambdaSpacing parse_spacing(std::string_view s) {
  if (s == "linear") return LambdaSpacing::linear;
  if (s == "log") return LambdaSpacing::log;
  throw RangeError("unknown lambda spacing '" + std::string(s) + "'");
}

ScreenPolicy parse_policy(std::string_view s) {
  if (s == "none") return ScreenPolicy::none;
  if (s == "ssr") return ScreenPolicy::ssr;
  if (s == "bedpp") return ScreenPolicy::bedpp;
  if (s == "hybrid" || s == "ssr-bedpp") return ScreenPolicy::hybrid;
  throw RangeError("unknown screening policy '" + std::string(s) + "'");
}

}  // namespace oocl
