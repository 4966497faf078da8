#include "aamcm/error.hpp"

namespace aamcm {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidCoordinate: return "invalid-coordinate";
    case Errc::InvalidTimestep: return "invalid-timestep";
    case Errc::EmptyNetwork: return "empty-network";
    case Errc::NoPath: return "no-path";
    case Errc::InvalidRoute: return "invalid-route";
    case Errc::ParseError: return "parse-error";
    case Errc::WrongHazardKind: return "wrong-hazard-kind";
    case Errc::AlreadyOnGround: return "already-on-ground";
    case Errc::InvalidTerminal: return "invalid-terminal";
    case Errc::UnknownAircraft: return "unknown-aircraft";
    case Errc::ConfigError: return "config-error";
    case Errc::EmptyEvaluation: return "empty-evaluation";
    case Errc::InsufficientData: return "insufficient-data";
    case Errc::IoError: return "io-error";
    case Errc::NotInitialized: return "not-initialized";
    case Errc::BadRequest: return "bad-request";
  }
  return "unknown";
}

}  // namespace aamcm
