#pragma once

#include <array>
#include <string_view>

namespace teleop::threat {

inline constexpr int kNumClasses = 8;

/// Canonical class set. Index 0 is the only non-threat class.
inline constexpr std::array<std::string_view, kNumClasses> kLabels = {
    "no_weapon", "assault_rifle", "revolver",     "pistol",
    "shotgun",   "submachine_gun", "sniper_rifle", "machine_gun"};

inline constexpr int kNoWeapon = 0;

/// Index of `name` in kLabels; throws InvalidInput for unknown names.
int label_index(std::string_view name);

}  // namespace teleop::threat
