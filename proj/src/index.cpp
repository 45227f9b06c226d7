#include "svcindex/index.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace svcindex {

std::string_view to_string(IndexMode mode) {
  switch (mode) {
    case IndexMode::Primary: return "primary";
    case IndexMode::Partial: return "partial";
    case IndexMode::Full: return "full";
  }
  return "?";
}

std::optional<IndexMode> parse_index_mode(std::string_view text) {
  if (text == "primary") return IndexMode::Primary;
  if (text == "partial") return IndexMode::Partial;
  if (text == "full") return IndexMode::Full;
  return std::nullopt;
}

AddStats& AddStats::operator+=(const AddStats& o) {
  global_scans += o.global_scans;
  local_scans += o.local_scans;
  created_key_classes += o.created_key_classes;
  created_input_similar_classes += o.created_input_similar_classes;
  created_similar_classes += o.created_similar_classes;
  return *this;
}

namespace {

void erase_value(std::vector<std::uint64_t>& v, std::uint64_t x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) v.erase(it);
}

}  // namespace

// ---------------------------------------------------------------------------
// Lookup
// ---------------------------------------------------------------------------

const KeyClass* IndexModel::find_key_class(ParamId key) const {
  auto it = key_map_.find(key);
  return it == key_map_.end() ? nullptr : &it->second;
}

const InputSimilarClass* IndexModel::input_similar(ClassId id) const {
  auto it = input_similar_pos_.find(id);
  return it == input_similar_pos_.end() ? nullptr : &input_similar_[it->second];
}

const SimilarClass* IndexModel::similar(ClassId id) const {
  auto it = similar_pos_.find(id);
  return it == similar_pos_.end() ? nullptr : &similar_[it->second];
}

const Service* IndexModel::service(ServiceId id) const {
  auto it = services_.find(id);
  return it == services_.end() ? nullptr : &it->second;
}

std::optional<Placement> IndexModel::placement(ServiceId id) const {
  auto it = placements_.find(id);
  if (it == placements_.end()) return std::nullopt;
  return it->second;
}

std::size_t IndexModel::key_class_size(ParamId key) const {
  const KeyClass* kc = find_key_class(key);
  return kc ? kc->members.size() : 0;
}

std::vector<ParamId> IndexModel::keys() const {
  std::vector<ParamId> out;
  out.reserve(key_map_.size());
  for (const auto& [key, kc] : key_map_) out.push_back(key);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ServiceId> IndexModel::leaf_services(const InputSimilarClass& isc) const {
  std::vector<ServiceId> out;
  if (mode_ == IndexMode::Full) {
    for (ClassId sid : isc.members) {
      if (const SimilarClass* sc = similar(sid)) {
        out.insert(out.end(), sc->members.begin(), sc->members.end());
      }
    }
  } else {
    out.assign(isc.members.begin(), isc.members.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ServiceId> IndexModel::leaf_services(const KeyClass& kc) const {
  std::vector<ServiceId> out;
  if (mode_ == IndexMode::Primary) {
    out.assign(kc.members.begin(), kc.members.end());
  } else {
    for (ClassId id : kc.members) {
      if (const InputSimilarClass* isc = input_similar(id)) {
        auto leaves = leaf_services(*isc);
        out.insert(out.end(), leaves.begin(), leaves.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Mutation
// ---------------------------------------------------------------------------

InputSimilarClass& IndexModel::input_similar_mut(ClassId id) {
  return input_similar_[input_similar_pos_.at(id)];
}

SimilarClass& IndexModel::similar_mut(ClassId id) { return similar_[similar_pos_.at(id)]; }

ClassId IndexModel::create_input_similar(ParamId key, const ParamSet& inputs) {
  const ClassId id = next_class_id_++;
  input_similar_pos_.emplace(id, input_similar_.size());
  input_similar_.push_back(InputSimilarClass{id, key, inputs, {}});
  ++input_similar_total_;
  return id;
}

ClassId IndexModel::create_similar(ClassId parent, const ParamSet& inputs, const ParamSet& outputs) {
  const ClassId id = next_class_id_++;
  similar_pos_.emplace(id, similar_.size());
  similar_.push_back(SimilarClass{id, parent, inputs, outputs, {}});
  return id;
}

void IndexModel::destroy_input_similar(ClassId id) {
  const std::size_t pos = input_similar_pos_.at(id);
  if (pos + 1 != input_similar_.size()) {
    input_similar_[pos] = std::move(input_similar_.back());
    input_similar_pos_[input_similar_[pos].id] = pos;
  }
  input_similar_.pop_back();
  input_similar_pos_.erase(id);
  --input_similar_total_;
}

void IndexModel::destroy_similar(ClassId id) {
  const std::size_t pos = similar_pos_.at(id);
  if (pos + 1 != similar_.size()) {
    similar_[pos] = std::move(similar_.back());
    similar_pos_[similar_[pos].id] = pos;
  }
  similar_.pop_back();
  similar_pos_.erase(id);
}

void IndexModel::insert(Service s, ParamId key, AddStats& stats) {
  validate_service(s);
  if (services_.contains(s.id)) throw DuplicateServiceError(s.id);
  if (!s.inputs.contains(key)) {
    throw InvalidServiceError("key " + std::to_string(key) + " is not an input of service " +
                              std::to_string(s.id));
  }

  auto [kit, created] = key_map_.try_emplace(key, KeyClass{key, {}});
  if (created) ++stats.created_key_classes;
  Placement where{key, std::nullopt, std::nullopt};

  if (mode_ == IndexMode::Primary) {
    kit->second.members.push_back(s.id);
  } else {
    const InputSimilarClass* found =
        find_input_similar_in_key_class(*this, kit->second, s.inputs, &stats.local_scans);
    ClassId isc_id;
    if (found) {
      isc_id = found->id;
    } else {
      isc_id = create_input_similar(key, s.inputs);
      kit->second.members.push_back(isc_id);
      ++stats.created_input_similar_classes;
    }
    where.input_similar = isc_id;

    if (mode_ == IndexMode::Partial) {
      input_similar_mut(isc_id).members.push_back(s.id);
    } else {
      std::optional<ClassId> sc_id;
      for (ClassId candidate : input_similar_mut(isc_id).members) {
        ++stats.local_scans;
        if (similar_[similar_pos_.at(candidate)].outputs == s.outputs) {
          sc_id = candidate;
          break;
        }
      }
      if (!sc_id) {
        sc_id = create_similar(isc_id, s.inputs, s.outputs);
        input_similar_mut(isc_id).members.push_back(*sc_id);
        ++stats.created_similar_classes;
      }
      similar_mut(*sc_id).members.push_back(s.id);
      where.similar = sc_id;
    }
  }

  placements_.emplace(s.id, where);
  services_.emplace(s.id, std::move(s));
}

bool IndexModel::erase(ServiceId id) {
  auto pit = placements_.find(id);
  if (pit == placements_.end()) return false;
  const Placement where = pit->second;
  KeyClass& kc = key_map_.at(where.key);

  if (mode_ == IndexMode::Primary) {
    erase_value(kc.members, id);
  } else {
    InputSimilarClass& isc = input_similar_mut(*where.input_similar);
    if (mode_ == IndexMode::Full) {
      SimilarClass& sc = similar_mut(*where.similar);
      erase_value(sc.members, id);
      if (sc.members.empty()) {
        erase_value(isc.members, sc.id);
        destroy_similar(sc.id);
      }
    } else {
      erase_value(isc.members, id);
    }
    // destroy_similar may have moved elements of similar_ only; isc is still valid.
    if (isc.members.empty()) {
      erase_value(kc.members, isc.id);
      destroy_input_similar(isc.id);
    }
  }
  if (kc.members.empty()) key_map_.erase(where.key);

  placements_.erase(pit);
  services_.erase(id);
  return true;
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

const InputSimilarClass* find_input_similar_in_key_class(const IndexModel& index, const KeyClass& kc,
                                                         const ParamSet& inputs, std::size_t* examined) {
  if (index.mode() == IndexMode::Primary) {
    throw ModeError("primary index has no input-similar classes");
  }
  for (ClassId id : kc.members) {
    const InputSimilarClass* isc = index.input_similar(id);
    if (examined) ++*examined;
    if (isc && isc->inputs == inputs) return isc;
  }
  return nullptr;
}

namespace {

class ViolationLog {
 public:
  template <typename... Parts>
  void add(const Parts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    out_.push_back(os.str());
  }
  std::vector<std::string> take() { return std::move(out_); }

 private:
  std::vector<std::string> out_;
};

}  // namespace

std::vector<std::string> integrity_check(const IndexModel& index) {
  ViolationLog log;
  const IndexMode mode = index.mode();
  std::unordered_map<ServiceId, std::size_t> reached;
  std::unordered_set<ClassId> seen_isc;
  std::unordered_set<ClassId> seen_sc;

  auto visit_service = [&](ServiceId sid, ParamId key, const ParamSet* expect_inputs,
                           const ParamSet* expect_outputs) {
    ++reached[sid];
    const Service* s = index.service(sid);
    if (!s) {
      log.add("service ", sid, " is indexed but missing from the store");
      return;
    }
    if (!s->inputs.contains(key)) {
      log.add("service ", sid, " sits under key ", key, " which is not one of its inputs ",
              to_string(s->inputs));
    }
    if (expect_inputs && !(s->inputs == *expect_inputs)) {
      log.add("service ", sid, " inputs ", to_string(s->inputs), " differ from its class inputs ",
              to_string(*expect_inputs));
    }
    if (expect_outputs && !(s->outputs == *expect_outputs)) {
      log.add("service ", sid, " outputs ", to_string(s->outputs), " differ from its class outputs ",
              to_string(*expect_outputs));
    }
    auto where = index.placement(sid);
    if (!where || where->key != key) {
      log.add("service ", sid, " placement does not record key ", key);
    }
  };

  for (const auto& [key, kc] : index.key_map()) {
    if (kc.key != key) log.add("key map entry ", key, " holds key class for key ", kc.key);
    if (kc.members.empty()) log.add("key class ", key, " is empty");

    if (mode == IndexMode::Primary) {
      for (ServiceId sid : kc.members) visit_service(sid, key, nullptr, nullptr);
      continue;
    }

    for (ClassId isc_id : kc.members) {
      const InputSimilarClass* isc = index.input_similar(isc_id);
      if (!isc) {
        log.add("key class ", key, " references missing input-similar class ", isc_id);
        continue;
      }
      if (!seen_isc.insert(isc_id).second) {
        log.add("input-similar class ", isc_id, " is referenced more than once");
        continue;
      }
      if (isc->key != key) {
        log.add("input-similar class ", isc_id, " has key ", isc->key, " but sits under key ", key);
      }
      if (!isc->inputs.contains(isc->key)) {
        log.add("input-similar class ", isc_id, " key ", isc->key, " is not in its inputs");
      }
      if (isc->members.empty()) log.add("input-similar class ", isc_id, " is empty");

      if (mode == IndexMode::Partial) {
        for (ServiceId sid : isc->members) visit_service(sid, key, &isc->inputs, nullptr);
        continue;
      }
      for (ClassId sc_id : isc->members) {
        const SimilarClass* sc = index.similar(sc_id);
        if (!sc) {
          log.add("input-similar class ", isc_id, " references missing similar class ", sc_id);
          continue;
        }
        if (!seen_sc.insert(sc_id).second) {
          log.add("similar class ", sc_id, " is referenced more than once");
          continue;
        }
        if (sc->parent != isc_id) {
          log.add("similar class ", sc_id, " records parent ", sc->parent, " but sits under ", isc_id);
        }
        if (!(sc->inputs == isc->inputs)) {
          log.add("similar class ", sc_id, " inputs differ from its input-similar class");
        }
        if (sc->members.empty()) log.add("similar class ", sc_id, " is empty");
        for (ServiceId sid : sc->members) visit_service(sid, key, &sc->inputs, &sc->outputs);
      }
    }
  }

  if (mode == IndexMode::Primary && !index.input_similar_classes().empty()) {
    log.add("primary index holds ", index.input_similar_classes().size(), " input-similar classes");
  }
  if (mode != IndexMode::Full && !index.similar_classes().empty()) {
    log.add(to_string(mode), " index holds ", index.similar_classes().size(), " similar classes");
  }
  for (const auto& isc : index.input_similar_classes()) {
    if (!seen_isc.contains(isc.id)) log.add("input-similar class ", isc.id, " is unreachable");
  }
  for (const auto& sc : index.similar_classes()) {
    if (!seen_sc.contains(sc.id)) log.add("similar class ", sc.id, " is unreachable");
  }
  if (index.input_similar_count() != index.input_similar_classes().size()) {
    log.add("m is ", index.input_similar_count(), " but enumeration finds ",
            index.input_similar_classes().size());
  }

  for (const auto& [sid, count] : reached) {
    if (count > 1) log.add("service ", sid, " is reachable from ", count, " leaf positions");
  }
  for (const auto& [sid, s] : index.services()) {
    if (!reached.contains(sid)) log.add("service ", sid, " is stored but not reachable from any key");
  }

  auto out = log.take();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> integrity_warnings(const IndexModel& index) {
  std::unordered_map<std::uint64_t, std::vector<const InputSimilarClass*>> by_fingerprint;
  for (const auto& isc : index.input_similar_classes()) by_fingerprint[isc.inputs.fingerprint()].push_back(&isc);

  std::vector<std::string> out;
  for (const auto& [fp, group] : by_fingerprint) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (group[i]->inputs == group[j]->inputs) {
          std::ostringstream os;
          os << "input set " << to_string(group[i]->inputs) << " is indexed under keys "
             << group[i]->key << " and " << group[j]->key;
          out.push_back(os.str());
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<ParamId, std::vector<ServiceId>> key_partition(const IndexModel& index) {
  std::map<ParamId, std::vector<ServiceId>> out;
  for (const auto& [key, kc] : index.key_map()) out.emplace(key, index.leaf_services(kc));
  return out;
}

}  // namespace svcindex
