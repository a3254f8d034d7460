#pragma once

#include <stdexcept>
#include <string>

namespace mrac {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

struct RankDeficient : Error {
  explicit RankDeficient(const std::string& what) : Error("rank deficient: " + what) {}
};

struct NotHurwitz : Error {
  explicit NotHurwitz(const std::string& what) : Error("not Hurwitz: " + what) {}
};

struct NotSymmetric : Error {
  explicit NotSymmetric(const std::string& what) : Error("not symmetric: " + what) {}
};

struct MatchingInfeasible : Error {
  explicit MatchingInfeasible(const std::string& what) : Error("matching infeasible: " + what) {}
};

struct OutsideRegion : Error {
  explicit OutsideRegion(const std::string& what) : Error("outside projection region: " + what) {}
};

struct NonFiniteState : Error {
  explicit NonFiniteState(const std::string& what) : Error("non-finite state: " + what) {}
};

struct TooFewSamples : Error {
  explicit TooFewSamples(const std::string& what) : Error("too few samples: " + what) {}
};

struct TruthUnavailable : Error {
  explicit TruthUnavailable(const std::string& what) : Error("truth unavailable: " + what) {}
};

// Carries the dotted path of the offending field, e.g. "plant.B".
struct ConfigInvalid : Error {
  ConfigInvalid(const std::string& field_path, const std::string& what)
      : Error("invalid config at " + field_path + ": " + what), field(field_path) {}
  std::string field;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

}  // namespace mrac
