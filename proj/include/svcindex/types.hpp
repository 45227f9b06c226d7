#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace svcindex {

using ParamId = std::uint32_t;
using ServiceId = std::uint64_t;
using ClassId = std::uint64_t;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A service (or service list) violates the Service invariants.
class InvalidServiceError : public Error {
 public:
  using Error::Error;
};

class DuplicateServiceError : public InvalidServiceError {
 public:
  explicit DuplicateServiceError(ServiceId id);
  ServiceId id() const noexcept { return id_; }

 private:
  ServiceId id_;
};

/// Strategy or benchmark misconfiguration (e.g. least-used without a table).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation is not defined for the index deployment mode.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// ParamSet
// ---------------------------------------------------------------------------

/// Set of parameter ids in canonical ascending order.
///
/// Iteration order is always sorted-by-id, so positional rules (such as the
/// designated key's "i-th input") are well defined. A 64-bit fingerprint is
/// cached so that equality tests across large class collections mostly cost a
/// single integer compare.
class ParamSet {
 public:
  ParamSet() = default;
  ParamSet(std::initializer_list<ParamId> ids);
  /// Sorts and drops duplicates.
  explicit ParamSet(std::vector<ParamId> ids);

  /// Like the vector constructor but rejects duplicates.
  static ParamSet strict(std::vector<ParamId> ids, const char* what);

  std::span<const ParamId> ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  ParamId operator[](std::size_t i) const { return ids_[i]; }
  auto begin() const noexcept { return ids_.begin(); }
  auto end() const noexcept { return ids_.end(); }

  bool contains(ParamId id) const noexcept;
  /// True iff every member of *this is in `other`.
  bool subset_of(const ParamSet& other) const noexcept;
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  friend bool operator==(const ParamSet& a, const ParamSet& b) noexcept {
    return a.fingerprint_ == b.fingerprint_ && a.ids_ == b.ids_;
  }

 private:
  void finish();

  std::vector<ParamId> ids_;
  std::uint64_t fingerprint_ = 0;
};

std::string to_string(const ParamSet& set);

// ---------------------------------------------------------------------------
// Service
// ---------------------------------------------------------------------------

using AttributeMap = std::map<std::string, std::string>;

/// A service s = {inputs, outputs, attributes}.
struct Service {
  ServiceId id = 0;
  ParamSet inputs;
  ParamSet outputs;
  AttributeMap attributes;
};

/// Builds a service from raw id lists, enforcing the Service invariants
/// (non-empty inputs, no duplicate ids within inputs or outputs).
Service make_service(ServiceId id, std::vector<ParamId> inputs, std::vector<ParamId> outputs,
                     AttributeMap attributes = {});

/// Throws InvalidServiceError when `s` has empty inputs.
void validate_service(const Service& s);

}  // namespace svcindex
