#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace featimp {

/// One `key = value` entry per line, in file order. Blank lines and lines
/// starting with `#` are skipped; surrounding whitespace is trimmed.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues read_kv(std::istream& in);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

}  // namespace featimp
