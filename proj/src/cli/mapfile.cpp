#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "degreelab/cli.hpp"

namespace degreelab::cli {

namespace {

std::size_t line_of(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::vector<std::string> extra_names(const MapFile& mf) {
  if (mf.parameter) return {*mf.parameter};
  return {};
}

}  // namespace

std::string fnv1a64(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::vector<Poly> MapFile::polys() const {
  std::vector<Poly> out;
  auto extra = extra_names(*this);
  for (std::size_t i = 0; i < components.size(); ++i) {
    try {
      out.push_back(polycore::parse_poly(components[i], n, extra));
    } catch (const polycore::ParseError& e) {
      throw InputError(source + ": component " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

PolyMap MapFile::map() const {
  if (parameter) throw InputError(source + ": family file given where a map is expected");
  return PolyMap(polys());
}

MapFile parse_mapfile(const std::string& text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ":" + std::to_string(line_of(text, e.byte ? e.byte - 1 : 0)) + ": " + e.what());
  }
  auto fail = [&](const std::string& msg) { throw InputError(source + ": " + msg); };
  if (!j.is_object()) fail("top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "name" && key != "n" && key != "components" && key != "parameter" && key != "metadata") {
      fail("unknown field '" + key + "'");
    }
  }
  MapFile mf;
  mf.source = source;
  mf.digest = fnv1a64(text);
  if (!j.contains("name") || !j["name"].is_string()) fail("'name' must be a string");
  mf.name = j["name"].get<std::string>();
  if (!j.contains("n") || !j["n"].is_number_unsigned() || j["n"].get<std::size_t>() == 0) {
    fail("'n' must be a positive integer");
  }
  mf.n = j["n"].get<std::size_t>();
  if (!j.contains("components") || !j["components"].is_array()) fail("'components' must be an array");
  for (const auto& c : j["components"]) {
    if (!c.is_string()) fail("every component must be a string");
    mf.components.push_back(c.get<std::string>());
  }
  if (mf.components.size() != mf.n) {
    fail("'components' has " + std::to_string(mf.components.size()) + " entries but n = " + std::to_string(mf.n));
  }
  if (j.contains("parameter")) {
    if (!j["parameter"].is_string()) fail("'parameter' must be a string");
    mf.parameter = j["parameter"].get<std::string>();
    const auto& p = *mf.parameter;
    if (p.empty() || p[0] == 'x' || !std::all_of(p.begin(), p.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); })) {
      fail("'parameter' must be an identifier not starting with 'x'");
    }
  }
  if (j.contains("metadata")) {
    if (!j["metadata"].is_object()) fail("'metadata' must be an object");
    mf.metadata = j["metadata"];
  }
  // Validate every component now, reporting the line it sits on.
  auto extra = extra_names(mf);
  for (std::size_t i = 0; i < mf.components.size(); ++i) {
    try {
      polycore::parse_poly(mf.components[i], mf.n, extra);
    } catch (const polycore::ParseError& e) {
      std::string quoted = nlohmann::json(mf.components[i]).dump();
      std::size_t at = text.find(quoted);
      std::string where = at == std::string::npos ? "" : ":" + std::to_string(line_of(text, at));
      throw InputError(source + where + ": component " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return mf;
}

MapFile load_mapfile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open map file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_mapfile(buf.str(), path);
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

Rational number(const std::string& s, Warnings* warn) {
  bool decimal = false;
  Rational q;
  try {
    q = polycore::parse_rational(s, &decimal);
  } catch (const polycore::ParseError& e) {
    throw InputError(std::string("bad number: ") + e.what());
  }
  if (decimal && warn) {
    warn->items.push_back("float literal '" + s + "' converted exactly to " + polycore::rational_to_string(q));
  }
  return q;
}

}  // namespace

std::vector<Rational> parse_point(const std::string& text, Warnings* warn) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  if (t.empty()) throw InputError("empty point");
  std::vector<Rational> out;
  for (const auto& part : split(t, ',')) out.push_back(number(part, warn));
  return out;
}

std::vector<std::vector<Rational>> parse_point_list(const std::string& text, Warnings* warn) {
  std::vector<std::vector<Rational>> out;
  for (const auto& part : split(text, ';')) {
    if (!part.empty()) out.push_back(parse_point(part, warn));
  }
  if (out.empty()) throw InputError("empty point list");
  return out;
}

IntervalBox parse_box(const std::string& text, std::size_t n, Warnings* warn) {
  std::vector<polycore::Interval> sides;
  std::string t = trim(text);
  std::size_t pos = 0;
  while (pos < t.size()) {
    if (t[pos] == ',' || t[pos] == ' ' || t[pos] == 'x') {
      ++pos;
      continue;
    }
    if (t[pos] != '[') throw InputError("box: expected '[' in '" + text + "'");
    std::size_t close = t.find(']', pos);
    if (close == std::string::npos) throw InputError("box: missing ']' in '" + text + "'");
    auto ends = split(t.substr(pos + 1, close - pos - 1), ',');
    if (ends.size() != 2) throw InputError("box: each interval needs two endpoints");
    Rational lo = number(ends[0], warn), hi = number(ends[1], warn);
    if (lo > hi) throw InputError("box: interval with lo > hi");
    sides.emplace_back(polycore::Interval::enclose(lo).lo, polycore::Interval::enclose(hi).hi);
    pos = close + 1;
  }
  if (sides.size() == 1 && n > 1) sides.assign(n, sides[0]);
  if (sides.size() != n) {
    throw InputError("box has " + std::to_string(sides.size()) + " intervals but the map has n = " + std::to_string(n));
  }
  return IntervalBox(std::move(sides));
}

}  // namespace degreelab::cli
