#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace aamcm {

/// The seven discrete agent actions. Enumerator values are the wire codes.
enum class Action : std::uint8_t {
  TurnLeft5 = 0,
  TurnLeft1 = 1,
  HoldHeading = 2,  // heading change of 0 degrees
  TurnRight1 = 3,
  TurnRight5 = 4,
  NoAction = 5,
  UseAssignedRoute = 6,
};

inline constexpr std::size_t kActionCount = 7;

inline constexpr std::array<Action, 5> kHeadingActions = {
    Action::TurnLeft5, Action::TurnLeft1, Action::HoldHeading, Action::TurnRight1,
    Action::TurnRight5};

constexpr bool is_heading_change(Action a) noexcept {
  return static_cast<std::uint8_t>(a) <= static_cast<std::uint8_t>(Action::TurnRight5);
}

/// Turn magnitude in degrees (positive = right/clockwise); 0 for non-turn actions.
constexpr double heading_delta(Action a) noexcept {
  switch (a) {
    case Action::TurnLeft5: return -5.0;
    case Action::TurnLeft1: return -1.0;
    case Action::TurnRight1: return 1.0;
    case Action::TurnRight5: return 5.0;
    default: return 0.0;
  }
}

constexpr std::optional<Action> action_from_code(long long code) noexcept {
  if (code < 0 || code >= static_cast<long long>(kActionCount)) return std::nullopt;
  return static_cast<Action>(code);
}

constexpr int action_code(Action a) noexcept { return static_cast<int>(a); }

std::string_view action_name(Action a) noexcept;

}  // namespace aamcm
