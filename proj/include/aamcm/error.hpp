#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aamcm {

enum class Errc {
  InvalidCoordinate,
  InvalidTimestep,
  EmptyNetwork,
  NoPath,
  InvalidRoute,
  ParseError,
  WrongHazardKind,
  AlreadyOnGround,
  InvalidTerminal,
  UnknownAircraft,
  ConfigError,
  EmptyEvaluation,
  InsufficientData,
  IoError,
  NotInitialized,
  BadRequest,
};

/// Stable kebab-case name, used as the `code` field of protocol errors.
std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace aamcm
