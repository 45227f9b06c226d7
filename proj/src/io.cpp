#include "svcindex/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace svcindex {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

template <typename Int>
Int parse_int(std::string_view text, const std::string& source, std::size_t lineno, const char* what) {
  text = trim(text);
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(source, lineno, std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<ParamId> parse_ids(std::string_view field, const std::string& source, std::size_t lineno) {
  std::vector<ParamId> out;
  if (trim(field).empty()) return out;
  for (auto part : split(field, ',')) out.push_back(parse_int<ParamId>(part, source, lineno, "parameter id"));
  return out;
}

std::pair<std::string, std::string> parse_pair(std::string_view item, const std::string& source,
                                               std::size_t lineno) {
  const auto eq = item.find('=');
  if (eq == std::string_view::npos) {
    throw ParseError(source, lineno, "attribute '" + std::string(item) + "' is not attr=val");
  }
  auto name = trim(item.substr(0, eq));
  if (name.empty()) throw ParseError(source, lineno, "empty attribute name");
  return {std::string(name), std::string(trim(item.substr(eq + 1)))};
}

void append_ids(std::string& out, const ParamSet& set) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(set[i]);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Repository
// ---------------------------------------------------------------------------

std::string format_service(const Service& s) {
  std::string out = std::to_string(s.id);
  out += ';';
  append_ids(out, s.inputs);
  out += ';';
  append_ids(out, s.outputs);
  out += ';';
  bool first = true;
  for (const auto& [name, value] : s.attributes) {
    if (!first) out += ',';
    first = false;
    out += name;
    out += '=';
    out += value;
  }
  return out;
}

Service parse_service(const std::string& line, const std::string& source, std::size_t lineno) {
  const auto fields = split(line, ';');
  if (fields.size() != 4) {
    throw ParseError(source, lineno, "expected 4 ';'-separated fields, found " + std::to_string(fields.size()));
  }
  const auto id = parse_int<ServiceId>(fields[0], source, lineno, "service id");
  AttributeMap attrs;
  if (!trim(fields[3]).empty()) {
    for (auto item : split(fields[3], ',')) {
      auto [name, value] = parse_pair(item, source, lineno);
      if (!attrs.emplace(std::move(name), std::move(value)).second) {
        throw ParseError(source, lineno, "repeated attribute");
      }
    }
  }
  try {
    return make_service(id, parse_ids(fields[1], source, lineno), parse_ids(fields[2], source, lineno),
                        std::move(attrs));
  } catch (const InvalidServiceError& e) {
    throw ParseError(source, lineno, e.what());
  }
}

void write_repository(std::ostream& out, std::span<const Service> services) {
  for (const Service& s : services) out << format_service(s) << '\n';
}

std::vector<Service> read_repository(std::istream& in, const std::string& source) {
  std::vector<Service> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    out.push_back(parse_service(line, source, lineno));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Requests
// ---------------------------------------------------------------------------

std::string format_request(const Request& r) {
  std::string out;
  append_ids(out, r.provided);
  out += '|';
  append_ids(out, r.required);
  out += '|';
  bool first = true;
  for (const auto& [name, values] : r.constraints) {
    for (const auto& v : values) {
      if (!first) out += ';';
      first = false;
      out += name;
      out += '=';
      out += v;
    }
  }
  return out;
}

Request parse_request(const std::string& line, const std::string& source, std::size_t lineno) {
  const auto fields = split(line, '|');
  if (fields.size() != 3) {
    throw ParseError(source, lineno, "expected 3 '|'-separated fields, found " + std::to_string(fields.size()));
  }
  Request r;
  r.provided = ParamSet(parse_ids(fields[0], source, lineno));
  r.required = ParamSet(parse_ids(fields[1], source, lineno));
  if (!trim(fields[2]).empty()) {
    for (auto item : split(fields[2], ';')) {
      auto [name, value] = parse_pair(item, source, lineno);
      r.constraints[name].insert(std::move(value));
    }
  }
  return r;
}

void write_requests(std::ostream& out, std::span<const Request> requests) {
  for (const Request& r : requests) out << format_request(r) << '\n';
}

std::vector<Request> read_requests(std::istream& in, const std::string& source) {
  std::vector<Request> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    out.push_back(parse_request(line, source, lineno));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::vector<Service> load_repository(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_repository(in, path.string());
}

void save_repository(const std::filesystem::path& path, std::span<const Service> services) {
  auto out = open_out(path);
  write_repository(out, services);
  finish_write(out, path);
}

std::vector<Request> load_requests(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_requests(in, path.string());
}

void save_requests(const std::filesystem::path& path, std::span<const Request> requests) {
  auto out = open_out(path);
  write_requests(out, requests);
  finish_write(out, path);
}

}  // namespace svcindex
