#pragma once

#include <stdexcept>
#include <string>

namespace blockclust {

// Machine-readable error kinds. The CLI maps these onto exit codes and a
// JSON error object on stderr; library code throws them directly.
enum class ErrorKind {
    IoError,
    SchemaError,
    InvalidTree,
    CycleOrForest,
    NonContiguousIndices,
    MultipleRoots,
    DuplicateAddress,
    UnknownClass,
    BadSelector,
    BadAddress,
    MalformedSignature,
    NotARoot,
    EmptyRegistry,
    EmptyVocabulary,
    EmptyMatrix,
    EmptyEvaluationSet,
    SchemeMismatch,
    UnlabeledRoot,
    TooFewPoints,
    InvalidDelta,
    InvalidSpec,
    ManifestMismatch,
    InvalidArgument,
    Internal,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, long line = -1)
        : std::runtime_error(std::move(message)), kind_(kind), line_(line) {}

    ErrorKind kind() const { return kind_; }
    // 1-based input line/row for parse errors, -1 when not applicable.
    long line() const { return line_; }

private:
    ErrorKind kind_;
    long line_;
};

} // namespace blockclust
