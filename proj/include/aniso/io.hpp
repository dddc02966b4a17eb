#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace aniso {

/// Round-trip decimal form of a double (%.17g); used for every number we write.
std::string fmt(double v);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// One "key=value" line per entry, in order.
void write_key_values(std::ostream& os, const KeyValues& kv);

}  // namespace aniso
