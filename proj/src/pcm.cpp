#include "pcq/pcm.hpp"

#include <sstream>

namespace pcq {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Equal: return "EQ";
    case Category::Slight: return "S";
    case Category::Moderate: return "M";
    case Category::Large: return "L";
  }
  return "EQ";
}

std::string_view to_string(Direction d) {
  return d == Direction::FirstPreferred ? "1" : "2";
}

Category parse_category(std::string_view token) {
  token = trim(token);
  if (token == "EQ" || token == "EQUAL") return Category::Equal;
  if (token == "S") return Category::Slight;
  if (token == "M") return Category::Moderate;
  if (token == "L") return Category::Large;
  throw Error("unknown verbal category '" + std::string(token) + "' (expected EQ, S, M or L)");
}

Direction parse_direction(std::string_view token) {
  token = trim(token);
  if (token == "1") return Direction::FirstPreferred;
  if (token == "2") return Direction::SecondPreferred;
  throw Error("unknown direction '" + std::string(token) + "' (expected 1 or 2)");
}

Scale parse_scale(std::string_view text) {
  Scale s;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw Error("scale item '" + std::string(item) + "' lacks '='");
    const std::string_view key = trim(item.substr(0, eq));
    const std::string value_text(trim(item.substr(eq + 1)));
    double value = 0;
    try {
      std::size_t used = 0;
      value = std::stod(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("scale value '" + value_text + "' is not a number");
    }
    if (key == "S") s.slight = value;
    else if (key == "M") s.moderate = value;
    else if (key == "L") s.large = value;
    else throw Error("unknown scale key '" + std::string(key) + "' (expected S, M or L)");
  }
  s.validate();
  return s;
}

std::string to_string(const Scale& s) {
  std::ostringstream os;
  os.precision(17);
  os << "S=" << s.slight << ",M=" << s.moderate << ",L=" << s.large;
  return os.str();
}

}  // namespace pcq
