#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "svcindex/index.hpp"
#include "svcindex/key_selection.hpp"
#include "svcindex/types.hpp"

namespace svcindex {

/// Q = (provided, required) plus attribute constraints L(O).
struct Request {
  ParamSet provided;
  ParamSet required;
  /// attribute name -> admissible values
  std::map<std::string, std::set<std::string>> constraints;
};

struct RetrievalResult {
  std::vector<ServiceId> services;  // ascending
  SearchStats stats;
};

/// Linear-scan oracle: every service whose inputs are a subset of `provided`.
std::vector<ServiceId> brute_force_retrieve(std::span<const Service> services, const ParamSet& provided);

/// Linear-scan oracle for discover().
std::vector<ServiceId> brute_force_discover(std::span<const Service> services, const Request& request);

/// Indexed retrieval. Only key classes whose key is in `provided` are visited;
/// each member's inputs are tested against `provided`.
RetrievalResult retrieve(const IndexModel& index, const ParamSet& provided);

/// Retrieval filtered by required outputs and attribute constraints.
std::vector<ServiceId> discover(const IndexModel& index, const Request& request);

/// Selects a key for `s` and files it. Throws DuplicateServiceError,
/// InvalidServiceError or ConfigError; the index is untouched on error.
AddStats add_service(IndexModel& index, Service s, KeySelector& strategy);

/// Returns false (index unchanged) when the id is unknown.
bool remove_service(IndexModel& index, ServiceId id);

/// Validates the whole list up front, then adds services in order.
IndexModel build_index(std::span<const Service> services, IndexMode mode, KeySelector& strategy,
                       AddStats* total = nullptr);

}  // namespace svcindex
