#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "svcindex/index.hpp"
#include "svcindex/random.hpp"
#include "svcindex/types.hpp"

namespace svcindex {

enum class StrategyKind { Original, MinCount, MaxCount, Random, Designated, LeastUsed };

inline constexpr StrategyKind kAllStrategies[] = {StrategyKind::Original,   StrategyKind::MinCount,
                                                  StrategyKind::MaxCount,   StrategyKind::Random,
                                                  StrategyKind::Designated, StrategyKind::LeastUsed};

std::string_view to_string(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view text);

/// Which appearing probability least-used minimizes: in retrieval requests,
/// or in service inputs.
enum class ProbabilitySource { RequestDistribution, InputDistribution };

enum class TableOrigin { Theoretical, Empirical };

/// Appearing probability for every parameter id 0..q-1.
class ProbabilityTable {
 public:
  /// Theoretical tables must sum to 1 within 1e-9; every entry in [0, 1].
  ProbabilityTable(std::vector<double> probs, TableOrigin origin);

  static ProbabilityTable uniform(std::size_t q);
  /// Relative frequency of each id over `observations`, universe size `q`.
  static ProbabilityTable empirical(std::span<const ParamSet> observations, std::size_t q);

  std::size_t size() const noexcept { return probs_.size(); }
  TableOrigin origin() const noexcept { return origin_; }
  std::span<const double> values() const noexcept { return probs_; }
  bool contains(ParamId id) const noexcept { return id < probs_.size(); }
  /// Throws ConfigError naming the parameter when it has no entry.
  double at(ParamId id) const;
  double sum() const;

 private:
  std::vector<double> probs_;
  TableOrigin origin_;
};

/// One `<param_id> <probability>` pair per line; `#` comments and blank lines
/// are skipped. Ids must cover 0..q-1 exactly once.
ProbabilityTable read_probability_table(std::istream& in, TableOrigin origin,
                                        const std::string& source = "<probabilities>");
void write_probability_table(std::ostream& out, const ProbabilityTable& table);

// ---------------------------------------------------------------------------
// The six selection procedures. Every one returns a member of s.inputs.
//
// The four index-consulting procedures start with a whole-index scan for an
// input-similar class whose inputs equal s.inputs and reuse its key; that scan
// is what `stats->global_scans` counts. Primary indexes have no input-similar
// classes, so the scan is skipped there and key-class sizes count services.
// ---------------------------------------------------------------------------

/// Whole-index scan for an input-similar class with exactly `inputs`.
const InputSimilarClass* scan_for_equal_inputs(const IndexModel& index, const ParamSet& inputs,
                                               AddStats* stats = nullptr);

/// Keeps key-class sizes near sqrt(m): reuse an exact-inputs class's key; else
/// the largest key class keyed by an input whose size is below sqrt(m); else a
/// random input.
ParamId select_key_original(const Service& s, const IndexModel& index, RandomStream& stream,
                            AddStats* stats = nullptr);

/// Reuse an exact-inputs key; else the smallest existing key class keyed by an
/// input; else a random input.
ParamId select_key_min_count(const Service& s, const IndexModel& index, RandomStream& stream,
                             AddStats* stats = nullptr);

/// Reuse an exact-inputs key; else the first input that is not yet a key;
/// else a random input.
ParamId select_key_max_count(const Service& s, const IndexModel& index, RandomStream& stream,
                             AddStats* stats = nullptr);

/// Reuse an exact-inputs key; else a random input.
ParamId select_key_random(const Service& s, const IndexModel& index, RandomStream& stream,
                          AddStats* stats = nullptr);

/// (sum of input ids mod |inputs|)-th input in ascending order.
ParamId select_key_designated(const Service& s);

/// Input with the smallest table probability; ties go to the smaller id.
ParamId select_key_least_used(const Service& s, const ProbabilityTable& table);

/// y = sum_i probs[i] * sizes[i]. Throws std::invalid_argument on a length
/// mismatch, negative sizes, or probabilities that are out of range or do not
/// sum to 1 within 1e-9.
double expected_search_cost(std::span<const double> sizes, std::span<const double> probs);

/// A configured strategy: kind, its random stream and, for least-used, the
/// probability table.
class KeySelector {
 public:
  explicit KeySelector(StrategyKind kind, std::uint64_t seed = 0,
                       std::shared_ptr<const ProbabilityTable> table = nullptr,
                       ProbabilitySource source = ProbabilitySource::RequestDistribution);

  StrategyKind kind() const noexcept { return kind_; }
  ProbabilitySource source() const noexcept { return source_; }
  const ProbabilityTable* table() const noexcept { return table_.get(); }

  /// Throws ConfigError when least-used has no table.
  void require_ready() const;

  ParamId select(const Service& s, const IndexModel& index, AddStats& stats);

 private:
  StrategyKind kind_;
  RandomStream stream_;
  std::shared_ptr<const ProbabilityTable> table_;
  ProbabilitySource source_;
};

}  // namespace svcindex
