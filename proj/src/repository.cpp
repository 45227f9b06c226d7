#include "svcindex/repository.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_set>

namespace svcindex {

namespace {

bool satisfies_constraints(const Service& s, const Request& request) {
  for (const auto& [name, admissible] : request.constraints) {
    auto it = s.attributes.find(name);
    if (it == s.attributes.end() || !admissible.contains(it->second)) return false;
  }
  return true;
}

/// Bitmap over the provided ids for O(1) membership during retrieval.
class ParamMask {
 public:
  explicit ParamMask(const ParamSet& set) {
    if (set.empty()) return;
    words_.assign(static_cast<std::size_t>(set.ids().back()) / 64 + 1, 0);
    for (ParamId id : set) words_[id / 64] |= std::uint64_t{1} << (id % 64);
  }

  bool contains(ParamId id) const {
    const std::size_t w = id / 64;
    return w < words_.size() && (words_[w] >> (id % 64) & 1U);
  }

  bool covers(const ParamSet& set) const {
    for (ParamId id : set) {
      if (!contains(id)) return false;
    }
    return true;
  }

 private:
  std::vector<std::uint64_t> words_;
};

// Walks every key class reachable from `provided`, calling `on_match` for each
// input-similar class (or primary-mode service) whose inputs are covered.
template <typename OnService, typename OnClass>
SearchStats walk_matches(const IndexModel& index, const ParamSet& provided, OnService on_service,
                         OnClass on_class) {
  SearchStats stats;
  const ParamMask mask(provided);
  for (ParamId key : provided) {
    ++stats.key_lookups;
    const KeyClass* kc = index.find_key_class(key);
    if (!kc) continue;
    if (index.mode() == IndexMode::Primary) {
      for (ServiceId sid : kc->members) {
        ++stats.classes_examined;
        const Service& s = *index.service(sid);
        if (mask.covers(s.inputs)) on_service(s);
      }
    } else {
      for (ClassId id : kc->members) {
        const InputSimilarClass& isc = *index.input_similar(id);
        ++stats.classes_examined;
        if (mask.covers(isc.inputs)) on_class(isc);
      }
    }
  }
  return stats;
}

}  // namespace

std::vector<ServiceId> brute_force_retrieve(std::span<const Service> services, const ParamSet& provided) {
  std::vector<ServiceId> out;
  for (const Service& s : services) {
    if (s.inputs.subset_of(provided)) out.push_back(s.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ServiceId> brute_force_discover(std::span<const Service> services, const Request& request) {
  std::vector<ServiceId> out;
  for (const Service& s : services) {
    if (s.inputs.subset_of(request.provided) && request.required.subset_of(s.outputs) &&
        satisfies_constraints(s, request)) {
      out.push_back(s.id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RetrievalResult retrieve(const IndexModel& index, const ParamSet& provided) {
  RetrievalResult result;
  auto& out = result.services;
  result.stats = walk_matches(
      index, provided, [&](const Service& s) { out.push_back(s.id); },
      [&](const InputSimilarClass& isc) {
        if (index.mode() == IndexMode::Full) {
          for (ClassId sc_id : isc.members) {
            const SimilarClass& sc = *index.similar(sc_id);
            out.insert(out.end(), sc.members.begin(), sc.members.end());
          }
        } else {
          out.insert(out.end(), isc.members.begin(), isc.members.end());
        }
      });
  std::sort(out.begin(), out.end());
  result.stats.services_returned = out.size();
  return result;
}

std::vector<ServiceId> discover(const IndexModel& index, const Request& request) {
  std::vector<ServiceId> out;
  auto accept = [&](const Service& s, bool outputs_checked) {
    if (!outputs_checked && !request.required.subset_of(s.outputs)) return;
    if (satisfies_constraints(s, request)) out.push_back(s.id);
  };
  walk_matches(
      index, request.provided, [&](const Service& s) { accept(s, false); },
      [&](const InputSimilarClass& isc) {
        if (index.mode() == IndexMode::Full) {
          for (ClassId sc_id : isc.members) {
            const SimilarClass& sc = *index.similar(sc_id);
            // Members share outputs, so one test covers the class.
            if (!request.required.subset_of(sc.outputs)) continue;
            for (ServiceId sid : sc.members) accept(*index.service(sid), true);
          }
        } else {
          for (ServiceId sid : isc.members) accept(*index.service(sid), false);
        }
      });
  std::sort(out.begin(), out.end());
  return out;
}

AddStats add_service(IndexModel& index, Service s, KeySelector& strategy) {
  validate_service(s);
  strategy.require_ready();
  if (index.contains(s.id)) throw DuplicateServiceError(s.id);
  AddStats stats;
  const ParamId key = strategy.select(s, index, stats);
  index.insert(std::move(s), key, stats);
  return stats;
}

bool remove_service(IndexModel& index, ServiceId id) { return index.erase(id); }

IndexModel build_index(std::span<const Service> services, IndexMode mode, KeySelector& strategy, AddStats* total) {
  strategy.require_ready();
  std::unordered_set<ServiceId> ids;
  ids.reserve(services.size());
  for (const Service& s : services) {
    validate_service(s);
    if (!ids.insert(s.id).second) throw DuplicateServiceError(s.id);
  }
  IndexModel index(mode);
  for (const Service& s : services) {
    const AddStats stats = add_service(index, s, strategy);
    if (total) *total += stats;
  }
  return index;
}

}  // namespace svcindex
