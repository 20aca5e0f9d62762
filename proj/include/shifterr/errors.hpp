#pragma once

#include <stdexcept>
#include <string>

namespace shifterr {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeMismatch : Error {
  explicit ShapeMismatch(const std::string& msg) : Error("ShapeMismatch: " + msg) {}
};

struct SingularDesign : Error {
  explicit SingularDesign(const std::string& msg) : Error("SingularDesign: " + msg) {}
};

struct NoConvergence : Error {
  explicit NoConvergence(const std::string& msg) : Error("NoConvergence: " + msg) {}
};

struct DegenerateGrid : Error {
  explicit DegenerateGrid(const std::string& msg) : Error("DegenerateGrid: " + msg) {}
};

struct SeparableData : Error {
  explicit SeparableData(const std::string& msg) : Error("SeparableData: " + msg) {}
};

struct SingleClass : Error {
  explicit SingleClass(const std::string& msg) : Error("SingleClass: " + msg) {}
};

struct Saturated : Error {
  explicit Saturated(const std::string& msg) : Error("Saturated: " + msg) {}
};

struct MissingSigma : Error {
  explicit MissingSigma(const std::string& msg) : Error("MissingSigma: " + msg) {}
};

struct FailedReplicates : Error {
  explicit FailedReplicates(const std::string& msg) : Error("FailedReplicates: " + msg) {}
};

struct IncompatibleLoss : Error {
  explicit IncompatibleLoss(const std::string& msg) : Error("IncompatibleLoss: " + msg) {}
};

struct ZeroTruth : Error {
  explicit ZeroTruth(const std::string& msg) : Error("ZeroTruth: " + msg) {}
};

struct TooFewGroups : Error {
  explicit TooFewGroups(const std::string& msg) : Error("TooFewGroups: " + msg) {}
};

struct MissingGroups : Error {
  explicit MissingGroups(const std::string& msg) : Error("MissingGroups: " + msg) {}
};

struct MissingColumn : Error {
  explicit MissingColumn(const std::string& msg) : Error("MissingColumn: " + msg) {}
};

struct NonNumericFeature : Error {
  explicit NonNumericFeature(const std::string& msg) : Error("NonNumericFeature: " + msg) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& msg) : Error("ParseError: " + msg) {}
};

struct InfeasibleImbalance : Error {
  explicit InfeasibleImbalance(const std::string& msg) : Error("InfeasibleImbalance: " + msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("ConfigError: " + msg) {}
};

}  // namespace shifterr
