#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace iris {

enum class ErrorCode {
  MalformedHeader,
  TruncatedData,
  UnsupportedMaxval,
  IoFailure,
  EmptyReference,
  BadKernel,
  TooSmall,
  BadThresholds,
  NoEdges,
  EmptyRadiusRange,
  PupilNotFound,
  SearchRangeOutOfImage,
  EmptySearchSpace,
  DegenerateMaximum,
  DegenerateAnnulus,
  AllMasked,
  IndivisibleDims,
  BadLength,
  InsufficientOverlap,
  DuplicateId,
  UnknownSubject,
  EmptyStore,
  EmptyInput,
  SpecInvalid,
  BadConfig,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace iris
