#pragma once

#include <string>
#include <vector>

namespace potmeter {

// Built-in, ready-to-run scenario files.  These are ordinary config texts
// (same parser as user files) so dump-preset output can be edited and re-fed.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);  // throws ConfigError for unknown names

}  // namespace potmeter
