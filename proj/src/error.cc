#include "lud/error.h"

namespace lud {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDegeneratePair: return "degenerate pair";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kOracleSize: return "oracle size";
    case ErrorCode::kTrivialInput: return "trivial input";
    case ErrorCode::kNoWellPosedSubproblem: return "no well-posed subproblem";
    case ErrorCode::kUnsolvable: return "unsolvable";
    case ErrorCode::kInnerSolver: return "inner solver";
    case ErrorCode::kSceneGeneration: return "scene generation";
    case ErrorCode::kInsufficientSamples: return "insufficient samples";
    case ErrorCode::kEstimation: return "estimation";
    case ErrorCode::kSignAmbiguous: return "sign ambiguous";
    case ErrorCode::kDegenerateEstimate: return "degenerate estimate";
    case ErrorCode::kDegenerateTruth: return "degenerate truth";
    case ErrorCode::kContractViolation: return "contract violation";
    case ErrorCode::kSpec: return "spec error";
  }
  return "unknown";
}

}  // namespace lud
