#pragma once

#include <string>

namespace bbmnet {

/// Shortest-faithful decimal for a double: 17 significant digits, "inf"
/// for infinities. Round-trips exactly and is locale-independent.
std::string format_double(double value);

} // namespace bbmnet
