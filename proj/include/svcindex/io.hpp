#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "svcindex/repository.hpp"
#include "svcindex/types.hpp"

namespace svcindex {

// Repository files hold one service per line:
//
//   <service_id>;<input_id,...>;<output_id,...>;<attr=val,attr=val,...>
//
// The attribute field may be empty. Blank lines and lines starting with '#'
// are skipped.

void write_repository(std::ostream& out, std::span<const Service> services);
std::vector<Service> read_repository(std::istream& in, const std::string& source = "<repository>");

std::string format_service(const Service& s);
/// Parses one repository line; `lineno` only labels errors.
Service parse_service(const std::string& line, const std::string& source = "<repository>",
                      std::size_t lineno = 0);

// Request files hold one request per line:
//
//   <provided ids>|<required ids>|<attr=val;attr=val;...>
//
// Ids are comma-separated and any segment may be empty. A repeated attribute
// name widens its admissible value set.

void write_requests(std::ostream& out, std::span<const Request> requests);
std::vector<Request> read_requests(std::istream& in, const std::string& source = "<requests>");

std::string format_request(const Request& r);
Request parse_request(const std::string& line, const std::string& source = "<requests>", std::size_t lineno = 0);

// File helpers; errors name the path.
std::vector<Service> load_repository(const std::filesystem::path& path);
void save_repository(const std::filesystem::path& path, std::span<const Service> services);
std::vector<Request> load_requests(const std::filesystem::path& path);
void save_requests(const std::filesystem::path& path, std::span<const Request> requests);

}  // namespace svcindex
