#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace twinlat {

// shortest text that round-trips: %.17g
std::string fmt17(double x);

// "# key = value" lines placed at the top of every exported file
using Header = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& os, const Header& header);

// Parses the "# key = value" block; stops at the first line not starting with '#'.
// The stream is left positioned at that line.
Header read_header(std::istream& is);

const std::string* find_entry(const Header& header, const std::string& key);

std::vector<std::string> split_csv_line(const std::string& line);

double parse_double(const std::string& text);
int parse_int(const std::string& text);

}  // namespace twinlat
