#pragma once

#include <string>

#include "cohsim/twobody.hpp"

// Flat key-value scenario files: one `key = value` per line, `#` comments.
// Keys: name, mass_a, mass_b, n_a, n_b, box_a, box_b, a_center, a_width,
// a_momentum, b_center, b_width, b_momentum, potential (none | gauss |
// soft_coulomb), v0, range, soften, dt, t_max, sample_stride.

namespace cohsim {

ScatteringScenario parse_scenario(const std::string& text);
ScatteringScenario load_scenario(const std::string& path);

}  // namespace cohsim
