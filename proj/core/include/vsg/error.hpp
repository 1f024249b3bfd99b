#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsg {

// Base class for every error raised by the library. `kind()` is a short
// stable token used by the command line tool for machine-parsable output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define VSG_DEFINE_ERROR(Name, token)                                  \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(token, message) {} \
  }

VSG_DEFINE_ERROR(ParseError, "parse");
VSG_DEFINE_ERROR(TaxonomyError, "taxonomy");
VSG_DEFINE_ERROR(LookupError, "lookup");
VSG_DEFINE_ERROR(MappingError, "mapping");
VSG_DEFINE_ERROR(DimensionError, "dimension");
VSG_DEFINE_ERROR(ConfigError, "config");
VSG_DEFINE_ERROR(GraphError, "graph");
VSG_DEFINE_ERROR(TrainingError, "training");
VSG_DEFINE_ERROR(UsageError, "usage");
VSG_DEFINE_ERROR(CheckpointError, "checkpoint");
VSG_DEFINE_ERROR(PairingError, "pairing");
VSG_DEFINE_ERROR(GeneratorError, "generator");
VSG_DEFINE_ERROR(EvaluationError, "evaluation");
VSG_DEFINE_ERROR(IoError, "io");

#undef VSG_DEFINE_ERROR

}  // namespace vsg
