#pragma once

#include "bbmnet/metric_graph.hpp"

#include <iosfwd>
#include <string>

namespace bbmnet {

// Line-oriented network description.
//
//   # format 1
//   vertices <count>
//   edge <id> <tail> <head> length=<float|inf> a=<float> b=<float> d=<float>
//        [infinite_end=head|tail]
//   base_speed <float>          (optional, default 1.0)
//
// `#` starts a comment; blank lines are ignored. Edge ids must cover
// 0..E-1; the vertex slot of an infinite end is written as -1.
struct ParsedNetwork {
    MetricGraph graph;
    double base_speed = 1.0;
};

/// Parse a network description. Throws Error(ParseError) with the line
/// number on malformed input; graph invariant violations surface as the
/// usual build errors.
ParsedNetwork parse_network(std::istream& in);
ParsedNetwork parse_network_file(const std::string& path);

/// Render a graph in the same format; parsing the result reproduces the
/// graph exactly (floats use 17 significant digits).
std::string write_network(const MetricGraph& g, double base_speed);

} // namespace bbmnet
