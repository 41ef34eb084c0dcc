#pragma once

#include <stdexcept>
#include <string>

namespace fuse {

// Process exit codes used by the CLI.
enum class ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kData = 2,
  kNumeric = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

// Malformed or inconsistent input data: dataset rows, store records, model files.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Training or numeric failure: singular systems, non-finite values, undefined correlations.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ExitCode::kNumeric, what) {}
};

// An embedding provider could not resolve a text.
class ProviderMiss : public DataError {
 public:
  explicit ProviderMiss(const std::string& text)
      : DataError("no embedding for text: \"" + text + "\""), text_(text) {}
  const std::string& text() const noexcept { return text_; }

 private:
  std::string text_;
};

// Non-success reply from the remote encoder. Retriable by the caller.
class RemoteError : public DataError {
 public:
  RemoteError(int status, const std::string& what) : DataError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// Model file whose format version this build does not read.
class VersionMismatch : public DataError {
 public:
  explicit VersionMismatch(const std::string& what) : DataError(what) {}
};

}  // namespace fuse
