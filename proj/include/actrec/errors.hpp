#ifndef ACTREC_ERRORS_HPP
#define ACTREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace actrec {

// Base for every precondition / invariant violation. The CLI maps this
// family to exit code 1.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Base for filesystem and container failures. CLI exit code 2.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidConfig : ValidationError {
    using ValidationError::ValidationError;
};
struct DimensionMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct DegenerateBox : ValidationError {
    using ValidationError::ValidationError;
};
struct BoxOutOfBounds : ValidationError {
    using ValidationError::ValidationError;
};
struct TooFewFrames : ValidationError {
    using ValidationError::ValidationError;
};
struct EmptyTrainingSet : ValidationError {
    using ValidationError::ValidationError;
};
struct SequenceTooShort : ValidationError {
    using ValidationError::ValidationError;
};
struct NonFiniteObservation : ValidationError {
    using ValidationError::ValidationError;
};
struct TooLargeForEnumeration : ValidationError {
    using ValidationError::ValidationError;
};
struct NumericalFailure : ValidationError {
    using ValidationError::ValidationError;
};
struct EmptySequence : ValidationError {
    using ValidationError::ValidationError;
};
struct IncompleteBank : ValidationError {
    using ValidationError::ValidationError;
};
struct MissingComponent : ValidationError {
    using ValidationError::ValidationError;
};
struct FingerprintMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct InsufficientData : ValidationError {
    using ValidationError::ValidationError;
};
struct ClassMissing : ValidationError {
    using ValidationError::ValidationError;
};
struct SchemaVersionMismatch : ValidationError {
    using ValidationError::ValidationError;
};
struct CorruptModel : ValidationError {
    using ValidationError::ValidationError;
};
struct DegenerateData : ValidationError {
    using ValidationError::ValidationError;
};

}  // namespace actrec

#endif
