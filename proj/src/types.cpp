#include "svcindex/types.hpp"

#include <algorithm>
#include <sstream>

namespace svcindex {

DuplicateServiceError::DuplicateServiceError(ServiceId id)
    : InvalidServiceError("duplicate service id " + std::to_string(id)), id_(id) {}

namespace {

std::string format_parse_error(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  return os.str();
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(format_parse_error(source, line, what)), line_(line) {}

ParamSet::ParamSet(std::initializer_list<ParamId> ids) : ParamSet(std::vector<ParamId>(ids)) {}

ParamSet::ParamSet(std::vector<ParamId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  finish();
}

ParamSet ParamSet::strict(std::vector<ParamId> ids, const char* what) {
  const std::size_t n = ids.size();
  ParamSet set(std::move(ids));
  if (set.size() != n) {
    throw InvalidServiceError(std::string(what) + " contain duplicate parameter ids");
  }
  return set;
}

void ParamSet::finish() {
  // FNV-1a over the canonical sequence.
  std::uint64_t h = 1469598103934665603ULL;
  for (ParamId id : ids_) {
    h ^= id;
    h *= 1099511628211ULL;
  }
  fingerprint_ = h;
}

bool ParamSet::contains(ParamId id) const noexcept {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool ParamSet::subset_of(const ParamSet& other) const noexcept {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

std::string to_string(const ParamSet& set) {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(set[i]);
  }
  out += '}';
  return out;
}

Service make_service(ServiceId id, std::vector<ParamId> inputs, std::vector<ParamId> outputs,
                     AttributeMap attributes) {
  Service s;
  s.id = id;
  s.inputs = ParamSet::strict(std::move(inputs), "inputs");
  s.outputs = ParamSet::strict(std::move(outputs), "outputs");
  s.attributes = std::move(attributes);
  validate_service(s);
  return s;
}

void validate_service(const Service& s) {
  if (s.inputs.empty()) {
    throw InvalidServiceError("service " + std::to_string(s.id) + " has no inputs");
  }
}

}  // namespace svcindex
