#pragma once

#include <array>

namespace pvi {

// Per-day accounting recorded by a simulator step; slot k holds product k
// (single-product scenarios use slot 0 only).
struct StepStats {
  double reward = 0.0;
  std::array<int, 2> demand{0, 0};
  std::array<int, 2> filled{0, 0};   // demand met, including substitution fills
  std::array<int, 2> expired{0, 0};  // units perishing at the end of the day
  std::array<int, 2> received{0, 0};  // units accepted into stock
  std::array<int, 2> holding{0, 0};   // units counted for the holding KPI
};

}  // namespace pvi
