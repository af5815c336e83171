#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nesy {

/**
 * Stable error codes shared by every module. The names are part of the
 * test corpus contract and of CLI diagnostics, so do not rename them.
 */
enum class ErrorCode {
    // logic-lang
    LexError,
    ParseError,
    UnsupportedFeature,
    DuplicateRelation,
    DuplicateQuery,
    UnknownRelation,
    ArityMismatch,
    TypeMismatch,
    NonGroundFact,
    MixedFactGroup,
    InvalidProbability,
    RangeRestrictionViolation,
    UnboundGuardVariable,
    UnstratifiableNegation,
    ProbabilisticNegation,
    // provenance / oracle
    TooManyFacts,
    TooManyWorlds,
    // reasoner
    MissingHead,
    IndexOutOfRange,
    NegativeProbability,
    NonTermination,
    UnknownQuery,
    // neural
    ShapeMismatch,
    NoCachedForward,
    BadTarget,
    BadCheckpoint,
    // constraints
    UnboundVariable,
    SearchSpaceTooLarge,
    // tasks / io
    BadMagic,
    TruncatedPayload,
    ConfigError,
    IoError,
    DataError,
};

std::string_view errorCodeName(ErrorCode code);

/**
 * Every module reports failures by throwing Error. `detail` carries the
 * offending name (relation, variable, expected token, ...) and line/column
 * are 1-based source positions, or 0 when the error has no source location.
 */
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {}, int line = 0, int column = 0);

    ErrorCode code() const {
        return code_;
    }
    const std::string& detail() const {
        return detail_;
    }
    int line() const {
        return line_;
    }
    int column() const {
        return column_;
    }

private:
    ErrorCode code_;
    std::string detail_;
    int line_;
    int column_;
};

}  // namespace nesy
