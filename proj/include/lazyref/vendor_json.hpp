#pragma once

// Single include point for the vendored nlohmann/json header so translation
// units agree on configuration.
#include "json.hpp"
