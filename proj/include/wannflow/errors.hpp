#pragma once

#include <stdexcept>
#include <string>

namespace wannflow {

// Exit codes used by the command line front end.  Library code throws the
// exception hierarchy below; the CLI maps each branch to one of these.
enum class ExitCode : int {
    ok = 0,
    config_error = 2,
    data_error = 3,
    compute_error = 4,
};

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: unknown flags, malformed config files, out-of-range options.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Bad data: unreadable/malformed files, schema mismatches, empty inputs.
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

/// Numeric failure inside an algorithm (non-finite values, impossible sizes).
struct ComputeError : Error {
    explicit ComputeError(const std::string& msg) : Error(msg) {}
};

// --- data errors ---

struct MissingColumn : DataError {
    explicit MissingColumn(const std::string& name)
        : DataError("missing required column: " + name) {}
};

struct EmptyDataset : DataError {
    explicit EmptyDataset(const std::string& what)
        : DataError("empty dataset: " + what) {}
};

struct LabelOutOfRange : DataError {
    LabelOutOfRange(long long label, int n_classes, std::size_t row)
        : DataError("label " + std::to_string(label) + " at row " + std::to_string(row) +
                    " outside [0, " + std::to_string(n_classes - 1) + "]") {}
};

struct CategoryTooSmall : DataError {
    CategoryTooSmall(int label, std::size_t count)
        : DataError("category " + std::to_string(label) + " has only " +
                    std::to_string(count) + " rows; need at least 3 to split") {}
};

struct InsufficientRows : DataError {
    explicit InsufficientRows(const std::string& what) : DataError("not enough rows: " + what) {}
};

struct OutputExists : DataError {
    explicit OutputExists(const std::string& path)
        : DataError("refusing to overwrite existing output: " + path +
                    " (pass --overwrite to allow)") {}
};

// --- config errors ---

struct EmptySelection : ConfigError {
    explicit EmptySelection(const std::string& what)
        : ConfigError("selection is empty: " + what) {}
};

struct WrongCardinality : ConfigError {
    explicit WrongCardinality(const std::string& what)
        : ConfigError("wrong cardinality: " + what) {}
};

// --- compute errors ---

struct ConstantInput : ComputeError {
    explicit ConstantInput(const std::string& what)
        : ComputeError("constant input where variation is required: " + what) {}
};

struct ZeroSpectralRadius : ComputeError {
    explicit ZeroSpectralRadius(const std::string& what)
        : ComputeError("cannot rescale matrix with zero spectral radius: " + what) {}
};

struct DimensionMismatch : ComputeError {
    explicit DimensionMismatch(const std::string& what)
        : ComputeError("dimension mismatch: " + what) {}
};

struct UntrainedModel : ComputeError {
    UntrainedModel() : ComputeError("model has no trained readout") {}
};

struct NoLegalMutation : ComputeError {
    NoLegalMutation() : ComputeError("no mutation operator is applicable to this genome") {}
};

struct TooManyFeatures : ComputeError {
    TooManyFeatures(std::size_t m, std::size_t limit)
        : ComputeError("exact Shapley enumeration limited to " + std::to_string(limit) +
                       " features, got " + std::to_string(m)) {}
};

}  // namespace wannflow
