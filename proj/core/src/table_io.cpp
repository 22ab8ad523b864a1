#include "twinlattice/table_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace twinlat {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_header(std::ostream& os, const Header& header) {
    for (const auto& [key, value] : header) os << "# " << key << " = " << value << '\n';
}

Header read_header(std::istream& is) {
    Header h;
    std::string line;
    while (is.peek() == '#') {
        std::getline(is, line);
        const auto eq = line.find(" = ");
        if (eq == std::string::npos || eq < 2) continue;
        h.emplace_back(line.substr(2, eq - 2), line.substr(eq + 3));
    }
    return h;
}

const std::string* find_entry(const Header& header, const std::string& key) {
    for (const auto& [k, v] : header) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw std::invalid_argument("not a number: '" + text + "'");
    }
    return v;
}

int parse_int(const std::string& text) {
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0' || errno == ERANGE) {
        throw std::invalid_argument("not an integer: '" + text + "'");
    }
    return static_cast<int>(v);
}

}  // namespace twinlat
