#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "svcindex/types.hpp"

namespace svcindex {

/// Deployment mode of the multilevel index.
///
///   Primary: key -> key class -> services
///   Partial: key -> key class -> input-similar class -> services
///   Full:    key -> key class -> input-similar class -> similar class -> services
enum class IndexMode { Primary, Partial, Full };

std::string_view to_string(IndexMode mode);
std::optional<IndexMode> parse_index_mode(std::string_view text);

/// Services with identical inputs and identical outputs.
struct SimilarClass {
  ClassId id = 0;
  ClassId parent = 0;  // enclosing input-similar class
  ParamSet inputs;
  ParamSet outputs;
  std::vector<ServiceId> members;
};

/// Services (partial) or similar classes (full) sharing one input set.
struct InputSimilarClass {
  ClassId id = 0;
  ParamId key = 0;
  ParamSet inputs;
  /// Full mode: SimilarClass ids. Partial mode: Service ids.
  std::vector<std::uint64_t> members;
};

/// Everything filed under one key.
struct KeyClass {
  ParamId key = 0;
  /// Primary mode: Service ids. Otherwise: InputSimilarClass ids.
  std::vector<std::uint64_t> members;
};

/// Counters recorded by one retrieval.
struct SearchStats {
  std::size_t key_lookups = 0;
  /// inputs-subset-of-request tests: input-similar classes, or services in
  /// primary mode.
  std::size_t classes_examined = 0;
  std::size_t services_returned = 0;
};

/// Counters recorded by one service addition.
struct AddStats {
  /// Input-similar classes examined by a whole-index scan during key selection.
  std::size_t global_scans = 0;
  /// Input-similar (or similar) classes examined inside the chosen key class.
  std::size_t local_scans = 0;
  std::size_t created_key_classes = 0;
  std::size_t created_input_similar_classes = 0;
  std::size_t created_similar_classes = 0;

  AddStats& operator+=(const AddStats& o);
};

/// Where a stored service sits in the index.
struct Placement {
  ParamId key = 0;
  std::optional<ClassId> input_similar;
  std::optional<ClassId> similar;
};

/// In-memory multilevel service index.
///
/// Single writer: `insert`/`erase` must not run concurrently with anything
/// else. Const member functions are safe to call from many threads once the
/// last mutation has completed.
class IndexModel {
 public:
  explicit IndexModel(IndexMode mode) : mode_(mode) {}

  IndexMode mode() const noexcept { return mode_; }

  // -- lookup ---------------------------------------------------------------

  const KeyClass* find_key_class(ParamId key) const;
  const InputSimilarClass* input_similar(ClassId id) const;
  const SimilarClass* similar(ClassId id) const;
  const Service* service(ServiceId id) const;
  std::optional<Placement> placement(ServiceId id) const;
  bool contains(ServiceId id) const { return services_.contains(id); }

  // -- sizes ----------------------------------------------------------------

  std::size_t service_count() const noexcept { return services_.size(); }
  /// n, the number of key classes.
  std::size_t key_count() const noexcept { return key_map_.size(); }
  /// m = |R2|, maintained incrementally.
  std::size_t input_similar_count() const noexcept { return input_similar_total_; }
  std::size_t similar_count() const noexcept { return similar_.size(); }
  /// x_i: members of the key class (services in primary mode, input-similar
  /// classes otherwise); 0 when the key is unused.
  std::size_t key_class_size(ParamId key) const;

  // -- enumeration ----------------------------------------------------------

  const std::unordered_map<ParamId, KeyClass>& key_map() const noexcept { return key_map_; }
  /// All input-similar classes (R2); order is deterministic for a given
  /// operation history.
  std::span<const InputSimilarClass> input_similar_classes() const noexcept { return input_similar_; }
  std::span<const SimilarClass> similar_classes() const noexcept { return similar_; }
  const std::unordered_map<ServiceId, Service>& services() const noexcept { return services_; }
  /// Keys in ascending order.
  std::vector<ParamId> keys() const;
  /// Leaf service ids reachable from a key class, ascending.
  std::vector<ServiceId> leaf_services(const KeyClass& kc) const;
  /// Leaf service ids reachable from an input-similar class, ascending.
  std::vector<ServiceId> leaf_services(const InputSimilarClass& isc) const;

  // -- mutation -------------------------------------------------------------

  /// Files `s` under `key`, creating key / input-similar / similar classes as
  /// the mode requires. The caller guarantees `key` is one of `s.inputs` and
  /// that `s.id` is new; violations throw.
  void insert(Service s, ParamId key, AddStats& stats);

  /// Removes a service and garbage-collects every class it empties.
  bool erase(ServiceId id);

 private:
  friend struct IndexModelTestAccess;

  InputSimilarClass& input_similar_mut(ClassId id);
  SimilarClass& similar_mut(ClassId id);
  ClassId create_input_similar(ParamId key, const ParamSet& inputs);
  ClassId create_similar(ClassId parent, const ParamSet& inputs, const ParamSet& outputs);
  void destroy_input_similar(ClassId id);
  void destroy_similar(ClassId id);

  IndexMode mode_;
  std::unordered_map<ParamId, KeyClass> key_map_;
  // Dense storage with swap-remove; the position maps translate ids.
  std::vector<InputSimilarClass> input_similar_;
  std::unordered_map<ClassId, std::size_t> input_similar_pos_;
  std::vector<SimilarClass> similar_;
  std::unordered_map<ClassId, std::size_t> similar_pos_;
  std::unordered_map<ServiceId, Service> services_;
  std::unordered_map<ServiceId, Placement> placements_;
  std::size_t input_similar_total_ = 0;
  ClassId next_class_id_ = 0;
};

/// Returns the member of `kc` whose input set equals `inputs`; examines only
/// that key class. `examined`, when given, is incremented per class tested.
/// Throws ModeError in primary mode.
const InputSimilarClass* find_input_similar_in_key_class(const IndexModel& index, const KeyClass& kc,
                                                         const ParamSet& inputs,
                                                         std::size_t* examined = nullptr);

/// Structural violations; empty iff the index is sound.
std::vector<std::string> integrity_check(const IndexModel& index);

/// Redundancy that is not a fault: input-similar classes with identical input
/// sets filed under different keys.
std::vector<std::string> integrity_warnings(const IndexModel& index);

/// key -> ascending leaf service ids, for every key class.
std::map<ParamId, std::vector<ServiceId>> key_partition(const IndexModel& index);

}  // namespace svcindex
