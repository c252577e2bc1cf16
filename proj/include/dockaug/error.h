#ifndef DOCKAUG_ERROR_H_
#define DOCKAUG_ERROR_H_

#include <map>
#include <stdexcept>
#include <string>

namespace dockaug {

enum class ErrorKind {
  kConfig,
  kFormat,
  kInvariant,
  kIo,
  kSize,
  kEmptyInput,
  kLabeling,
  kNoSkillSegment,
  kEmptyScene,
  kPlanning,
  kExhaustion,
  kGeneration,
};

const char* ErrorKindName(ErrorKind kind);

// Base class for every error raised by the library. The kind drives the CLI
// exit code mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the replanner when no valid path was found. `shape_id` names the
// shape blocking the straight-line connection ("workspace" when the path
// leaves the reach annulus).
class PlanningFailure : public Error {
 public:
  PlanningFailure(std::string shape_id, const std::string& message)
      : Error(ErrorKind::kPlanning, message), shape_id_(std::move(shape_id)) {}

  const std::string& shape_id() const { return shape_id_; }

 private:
  std::string shape_id_;
};

using RejectionHistogram = std::map<std::string, int>;

class ExhaustionError : public Error {
 public:
  ExhaustionError(int attempts, RejectionHistogram histogram,
                  const std::string& message)
      : Error(ErrorKind::kExhaustion, message),
        attempts_(attempts),
        histogram_(std::move(histogram)) {}

  int attempts() const { return attempts_; }
  const RejectionHistogram& histogram() const { return histogram_; }

 private:
  int attempts_;
  RejectionHistogram histogram_;
};

}  // namespace dockaug

#endif  // DOCKAUG_ERROR_H_
