#include "congruent/error.hpp"

#include <charconv>

#include "congruent/rational.hpp"

namespace congruent {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kExponentOutOfRange: return "ExponentOutOfRange";
    case Errc::kExponentMismatch: return "ExponentMismatch";
    case Errc::kRegularityMismatch: return "RegularityMismatch";
    case Errc::kDegreeMismatch: return "DegreeMismatch";
    case Errc::kDegreeTooLarge: return "DegreeTooLarge";
    case Errc::kNotStochastic: return "NotStochastic";
    case Errc::kEmptyFiber: return "EmptyFiber";
    case Errc::kInvalidWeights: return "InvalidWeights";
    case Errc::kInvalidFiberSizes: return "InvalidFiberSizes";
    case Errc::kDominationViolation: return "DominationViolation";
    case Errc::kBoundarySingularity: return "BoundarySingularity";
    case Errc::kOutsideParameterBox: return "OutsideParameterBox";
    case Errc::kIndexSetTooSmall: return "IndexSetTooSmall";
    case Errc::kOutsideLambdaGrid: return "OutsideLambdaGrid";
    case Errc::kSchema: return "SchemaError";
  }
  return "Unknown";
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(Errc::kSchema, "malformed rational '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  const auto num = parse_int(text.substr(0, slash), text);
  const auto den = parse_int(text.substr(slash + 1), text);
  if (den == 0) throw Error(Errc::kSchema, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

std::string to_string(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

}  // namespace congruent
