#pragma once

#include <string>

#include "pathgrad/model.hpp"

namespace pathgrad {

/// Self-describing JSON model document. Weights are written with 17
/// significant digits so that save -> load -> save is byte-identical.
std::string model_to_json(const ToyModel& model);
ToyModel model_from_json(const std::string& text);

void save_model(const ToyModel& model, const std::string& path);
ToyModel load_model(const std::string& path);

/// %.17g rendering used for every weight in the model document.
std::string format_weight(double value);

} // namespace pathgrad
