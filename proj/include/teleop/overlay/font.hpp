#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace teleop::overlay {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;

/// Seven rows of 5 bits, most significant of the low 5 bits is the leftmost column.
using Glyph = std::array<std::uint8_t, kGlyphHeight>;

/// Built-in bitmap for digits, '%', '?', '-' and space. Empty for anything else.
std::optional<Glyph> glyph(char c);

inline bool glyph_on(const Glyph& g, int col, int row) { return (g[row] >> (kGlyphWidth - 1 - col)) & 1u; }

}  // namespace teleop::overlay
