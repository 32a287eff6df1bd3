#include "bbmnet/network_file.hpp"

#include "bbmnet/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace bbmnet {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) tokens.push_back(tok);
    return tokens;
}

double parse_double(const std::string& tok, int line, const std::string& what) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    double value = 0.0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        parse_fail(line, "bad value for " + what + ": '" + tok + "'");
    }
    return value;
}

int parse_int(const std::string& tok, int line, const std::string& what) {
    int value = 0;
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        parse_fail(line, "bad value for " + what + ": '" + tok + "'");
    }
    return value;
}

} // namespace

ParsedNetwork parse_network(std::istream& in) {
    std::optional<int> vertex_count;
    std::optional<double> base_speed;
    std::map<int, EdgeSpec> edges_by_id;
    std::map<int, int> edge_line; // for diagnostics on duplicate ids

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::vector<std::string> tok = tokenize(raw);
        if (tok.empty()) continue;

        if (tok[0] == "vertices") {
            if (tok.size() != 2) parse_fail(line, "expected: vertices <count>");
            if (vertex_count) parse_fail(line, "duplicate vertices directive");
            vertex_count = parse_int(tok[1], line, "vertex count");
        } else if (tok[0] == "base_speed") {
            if (tok.size() != 2) parse_fail(line, "expected: base_speed <value>");
            if (base_speed) parse_fail(line, "duplicate base_speed directive");
            base_speed = parse_double(tok[1], line, "base_speed");
        } else if (tok[0] == "edge") {
            if (tok.size() < 4) {
                parse_fail(line, "expected: edge <id> <tail> <head> key=value...");
            }
            const int id = parse_int(tok[1], line, "edge id");
            EdgeSpec spec;
            spec.tail = parse_int(tok[2], line, "tail vertex");
            spec.head = parse_int(tok[3], line, "head vertex");
            bool has_length = false, has_a = false, has_b = false, has_d = false;
            for (size_t i = 4; i < tok.size(); ++i) {
                const auto eq = tok[i].find('=');
                if (eq == std::string::npos) {
                    parse_fail(line, "expected key=value, got '" + tok[i] + "'");
                }
                const std::string key = tok[i].substr(0, eq);
                const std::string value = tok[i].substr(eq + 1);
                if (key == "length") {
                    spec.length = parse_double(value, line, "length");
                    has_length = true;
                } else if (key == "a") {
                    spec.coeff_a = parse_double(value, line, "a");
                    has_a = true;
                } else if (key == "b") {
                    spec.coeff_b = parse_double(value, line, "b");
                    has_b = true;
                } else if (key == "d") {
                    spec.coeff_d = parse_double(value, line, "d");
                    has_d = true;
                } else if (key == "infinite_end") {
                    if (value == "head") {
                        spec.infinite_end = InfiniteEnd::head;
                    } else if (value == "tail") {
                        spec.infinite_end = InfiniteEnd::tail;
                    } else {
                        parse_fail(line, "infinite_end must be head or tail");
                    }
                } else {
                    parse_fail(line, "unknown key '" + key + "'");
                }
            }
            if (!has_length || !has_a || !has_b || !has_d) {
                parse_fail(line, "edge needs length=, a=, b= and d=");
            }
            if (std::isinf(spec.length) && spec.infinite_end == InfiniteEnd::none) {
                parse_fail(line, "length=inf requires infinite_end=head or tail");
            }
            if (!std::isinf(spec.length) && spec.infinite_end != InfiniteEnd::none) {
                parse_fail(line, "infinite_end requires length=inf");
            }
            if (spec.infinite_end == InfiniteEnd::head && spec.head != kNoVertex) {
                parse_fail(line, "infinite head must be written as -1");
            }
            if (spec.infinite_end == InfiniteEnd::tail && spec.tail != kNoVertex) {
                parse_fail(line, "infinite tail must be written as -1");
            }
            auto [it, inserted] = edges_by_id.emplace(id, spec);
            if (!inserted) {
                parse_fail(line, "duplicate edge id " + std::to_string(id) +
                                     " (first on line " +
                                     std::to_string(edge_line[id]) + ")");
            }
            edge_line[id] = line;
        } else {
            parse_fail(line, "unknown directive '" + tok[0] + "'");
        }
    }

    if (!vertex_count) parse_fail(line, "missing vertices directive");
    if (edges_by_id.empty()) parse_fail(line, "no edges");
    std::vector<EdgeSpec> edges;
    int expected = 0;
    for (const auto& [id, spec] : edges_by_id) {
        if (id != expected) {
            parse_fail(edge_line[id], "edge ids must be dense from 0; expected " +
                                          std::to_string(expected) + ", got " +
                                          std::to_string(id));
        }
        edges.push_back(spec);
        ++expected;
    }

    return ParsedNetwork{MetricGraph(std::move(edges), *vertex_count),
                         base_speed.value_or(1.0)};
}

ParsedNetwork parse_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
    }
    return parse_network(in);
}

std::string write_network(const MetricGraph& g, double base_speed) {
    std::ostringstream os;
    os << "# format 1\n";
    os << "vertices " << g.vertex_count() << "\n";
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const EdgeSpec& s = g.edge(e);
        os << "edge " << e << " " << s.tail << " " << s.head
           << " length=" << format_double(s.length)
           << " a=" << format_double(s.coeff_a)
           << " b=" << format_double(s.coeff_b)
           << " d=" << format_double(s.coeff_d);
        if (s.infinite_end == InfiniteEnd::head) os << " infinite_end=head";
        if (s.infinite_end == InfiniteEnd::tail) os << " infinite_end=tail";
        os << "\n";
    }
    os << "base_speed " << format_double(base_speed) << "\n";
    return os.str();
}

} // namespace bbmnet
