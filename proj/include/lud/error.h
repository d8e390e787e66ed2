#pragma once

#include <stdexcept>
#include <string>

namespace lud {

enum class ErrorCode {
  kInvalidArgument,
  kDegeneratePair,
  kParse,
  kOracleSize,
  kTrivialInput,
  kNoWellPosedSubproblem,
  kUnsolvable,
  kInnerSolver,
  kSceneGeneration,
  kInsufficientSamples,
  kEstimation,
  kSignAmbiguous,
  kDegenerateEstimate,
  kDegenerateTruth,
  kContractViolation,
  kSpec,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lud
