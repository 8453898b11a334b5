#include "amrkit/error.hpp"

namespace amrkit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedFasta: return "MalformedFasta";
        case ErrorCode::MalformedLabelTable: return "MalformedLabelTable";
        case ErrorCode::ConflictingLabel: return "ConflictingLabel";
        case ErrorCode::UnknownPhenotype: return "UnknownPhenotype";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::DuplicateIsolateId: return "DuplicateIsolateId";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::AmbiguousBase: return "AmbiguousBase";
        case ErrorCode::NoValidBases: return "NoValidBases";
        case ErrorCode::MixedSpecs: return "MixedSpecs";
        case ErrorCode::CorruptVocabularyFile: return "CorruptVocabularyFile";
        case ErrorCode::CorruptMatrixFile: return "CorruptMatrixFile";
        case ErrorCode::CountOverflow: return "CountOverflow";
        case ErrorCode::EmptyNode: return "EmptyNode";
        case ErrorCode::NoLabeledSamples: return "NoLabeledSamples";
        case ErrorCode::SingleClassTraining: return "SingleClassTraining";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::DegenerateWeakLearner: return "DegenerateWeakLearner";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::CorruptModelFile: return "CorruptModelFile";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SingleClassEval: return "SingleClassEval";
        case ErrorCode::SizeExceedsDataset: return "SizeExceedsDataset";
        case ErrorCode::InconsistentK: return "InconsistentK";
        case ErrorCode::ConflictingAnnotation: return "ConflictingAnnotation";
        case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
        case ErrorCode::FeatureCountMismatch: return "FeatureCountMismatch";
        case ErrorCode::VocabularyMismatch: return "VocabularyMismatch";
        case ErrorCode::MarkerLongerThanContig: return "MarkerLongerThanContig";
    }
    return "Unknown";
}

}  // namespace amrkit
