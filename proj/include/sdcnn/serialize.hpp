#pragma once

#include <string>

#include "sdcnn/experiment.hpp"

namespace sdcnn::bench {

/// Self-describing container: magic, JSON header (kind, spec, basis,
/// scaling, response transform, parameter manifest), then the raw 64-bit
/// parameter values. Round-trips exactly.
void save_model(ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace sdcnn::bench
