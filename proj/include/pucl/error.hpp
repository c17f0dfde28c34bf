#pragma once

#include <stdexcept>
#include <string>

namespace pucl {

enum class ErrorKind {
  kZeroRow,
  kZeroVector,
  kNonFinite,
  kDimMismatch,
  kInvalidSpec,
  kInvalidHyper,
  kInvalidLambda,
  kInvalidArgs,
  kInvalidConfig,
  kInsufficientPositives,
  kInsufficientRows,
  kEmptyPositives,
  kEmptyUnlabeled,
  kEmptySet,
  kEmptyAugmentationSet,
  kEmptyDomain,
  kMissingLabels,
  kMissingTruth,
  kSingleClass,
  kLengthMismatch,
  kTooFewRows,
  kTooLarge,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace pucl
