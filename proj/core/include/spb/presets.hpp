#pragma once

#include <string>
#include <vector>

#include "spb/experiments.hpp"

namespace spb {

const std::vector<std::string>& preset_names();
SweepConfig preset(const std::string& name);

}  // namespace spb
