#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pvi/config.hpp"

namespace pvi {

// Bundled experiment presets, named scenario/size/experiment, e.g.
// "a/m2/exp1", "b/m2/p3", "c/m5/exp2". Each reproduces one published
// experiment row.
std::vector<std::string> preset_names();
ExperimentConfig make_preset(const std::string& name);

// Shelf-life log-odds coefficients (intercepts, slopes) for scenario C by
// useful life and uncertainty kind.
std::pair<std::vector<double>, std::vector<double>> shelf_life_coefficients(int useful_life,
                                                                            bool endogenous);

}  // namespace pvi
