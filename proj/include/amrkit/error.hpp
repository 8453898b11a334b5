#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amrkit {

// Every domain failure carries one of these codes. The CLI prints the code
// name verbatim, so the names are part of the external interface.
enum class ErrorCode {
    MalformedFasta,
    MalformedLabelTable,
    ConflictingLabel,
    UnknownPhenotype,
    EmptyDataset,
    DuplicateIsolateId,
    IoError,
    InvalidK,
    KTooLarge,
    AmbiguousBase,
    NoValidBases,
    MixedSpecs,
    CorruptVocabularyFile,
    CorruptMatrixFile,
    CountOverflow,
    EmptyNode,
    NoLabeledSamples,
    SingleClassTraining,
    IndexOutOfRange,
    DegenerateWeakLearner,
    InvalidParameter,
    CorruptModelFile,
    TooFewSamples,
    LengthMismatch,
    SingleClassEval,
    SizeExceedsDataset,
    InconsistentK,
    ConflictingAnnotation,
    MalformedAnnotation,
    FeatureCountMismatch,
    VocabularyMismatch,
    MarkerLongerThanContig,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace amrkit
