#include "teleop/threat/labels.hpp"

#include <string>

#include "teleop/error.hpp"

namespace teleop::threat {

int label_index(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i)
    if (kLabels[i] == name) return i;
  throw InvalidInput("unknown class label '" + std::string(name) + "'");
}

}  // namespace teleop::threat
