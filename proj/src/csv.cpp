#include "bbmnet/csv.hpp"

#include <cmath>
#include <cstdio>

namespace bbmnet {

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) value = 0.0; // never print -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace bbmnet
