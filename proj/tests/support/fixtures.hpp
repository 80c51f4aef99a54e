#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "locus/json_io.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(LOCUS_SOURCE_DIR) + "/fixtures/" + name; }

inline std::string read(const std::string& name) {
    std::ifstream in(path(name));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline locus::Portfolio load(const std::string& name) { return locus::parse_portfolio(read(name)); }

}  // namespace fixtures
