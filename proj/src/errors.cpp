#include "blockclust/errors.hpp"

namespace blockclust {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::InvalidTree: return "InvalidTree";
        case ErrorKind::CycleOrForest: return "CycleOrForest";
        case ErrorKind::NonContiguousIndices: return "NonContiguousIndices";
        case ErrorKind::MultipleRoots: return "MultipleRoots";
        case ErrorKind::DuplicateAddress: return "DuplicateAddress";
        case ErrorKind::UnknownClass: return "UnknownClass";
        case ErrorKind::BadSelector: return "BadSelector";
        case ErrorKind::BadAddress: return "BadAddress";
        case ErrorKind::MalformedSignature: return "MalformedSignature";
        case ErrorKind::NotARoot: return "NotARoot";
        case ErrorKind::EmptyRegistry: return "EmptyRegistry";
        case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorKind::EmptyMatrix: return "EmptyMatrix";
        case ErrorKind::EmptyEvaluationSet: return "EmptyEvaluationSet";
        case ErrorKind::SchemeMismatch: return "SchemeMismatch";
        case ErrorKind::UnlabeledRoot: return "UnlabeledRoot";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::InvalidDelta: return "InvalidDelta";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::ManifestMismatch: return "ManifestMismatch";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace blockclust
