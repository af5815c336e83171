#include "nesy/error.h"

namespace nesy {

std::string_view errorCodeName(ErrorCode code) {
    switch (code) {
        case ErrorCode::LexError: return "LexError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
        case ErrorCode::DuplicateRelation: return "DuplicateRelation";
        case ErrorCode::DuplicateQuery: return "DuplicateQuery";
        case ErrorCode::UnknownRelation: return "UnknownRelation";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::NonGroundFact: return "NonGroundFact";
        case ErrorCode::MixedFactGroup: return "MixedFactGroup";
        case ErrorCode::InvalidProbability: return "InvalidProbability";
        case ErrorCode::RangeRestrictionViolation: return "RangeRestrictionViolation";
        case ErrorCode::UnboundGuardVariable: return "UnboundGuardVariable";
        case ErrorCode::UnstratifiableNegation: return "UnstratifiableNegation";
        case ErrorCode::ProbabilisticNegation: return "ProbabilisticNegation";
        case ErrorCode::TooManyFacts: return "TooManyFacts";
        case ErrorCode::TooManyWorlds: return "TooManyWorlds";
        case ErrorCode::MissingHead: return "MissingHead";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::NegativeProbability: return "NegativeProbability";
        case ErrorCode::NonTermination: return "NonTermination";
        case ErrorCode::UnknownQuery: return "UnknownQuery";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NoCachedForward: return "NoCachedForward";
        case ErrorCode::BadTarget: return "BadTarget";
        case ErrorCode::BadCheckpoint: return "BadCheckpoint";
        case ErrorCode::UnboundVariable: return "UnboundVariable";
        case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::TruncatedPayload: return "TruncatedPayload";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::DataError: return "DataError";
    }
    return "Unknown";
}

namespace {

std::string render(ErrorCode code, const std::string& message, int line, int column) {
    std::string out(errorCodeName(code));
    if (line > 0) {
        out += " at " + std::to_string(line) + ":" + std::to_string(column);
    }
    return out + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::string detail, int line, int column)
        : std::runtime_error(render(code, message, line, column)), code_(code), detail_(std::move(detail)),
          line_(line), column_(column) {}

}  // namespace nesy
