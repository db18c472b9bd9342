#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace congruent {

enum class Errc {
  kInvalidArgument,
  kDimensionMismatch,
  kExponentOutOfRange,
  kExponentMismatch,
  kRegularityMismatch,
  kDegreeMismatch,
  kDegreeTooLarge,
  kNotStochastic,
  kEmptyFiber,
  kInvalidWeights,
  kInvalidFiberSizes,
  kDominationViolation,
  kBoundarySingularity,
  kOutsideParameterBox,
  kIndexSetTooSmall,
  kOutsideLambdaGrid,
  kSchema,
};

std::string_view errc_name(Errc code);

/// Every failure raised by the library carries one of the codes above so
/// that callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace congruent
