#include "teleop/overlay/font.hpp"

namespace teleop::overlay {

namespace {

constexpr std::array<Glyph, 10> kDigits = {{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
}};

}  // namespace

std::optional<Glyph> glyph(char c) {
  if (c >= '0' && c <= '9') return kDigits[c - '0'];
  switch (c) {
    case '%': return Glyph{0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03};
    case '?': return Glyph{0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04};
    case '-': return Glyph{0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00};
    case ' ': return Glyph{};
    default: return std::nullopt;
  }
}

}  // namespace teleop::overlay
