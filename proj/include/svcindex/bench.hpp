#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svcindex/index.hpp"
#include "svcindex/key_selection.hpp"
#include "svcindex/repository.hpp"
#include "svcindex/workload.hpp"

namespace svcindex {

/// Which appearing probabilities are unequal.
enum class Scenario { EqualProb, UnequalInputs, UnequalRequests };

inline constexpr Scenario kAllScenarios[] = {Scenario::EqualProb, Scenario::UnequalInputs,
                                             Scenario::UnequalRequests};
inline constexpr IndexMode kAllModes[] = {IndexMode::Primary, IndexMode::Partial, IndexMode::Full};

std::string_view to_string(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view text);
SkewTarget skew_target(Scenario scenario);

enum class Metric { RetrievalClassesExamined, RetrievalWallMs, AdditionGlobalScans, AdditionWallMs };

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view text);
/// Wall-time metrics depend on the machine; count metrics do not.
bool is_wall_time(Metric metric);

struct BenchConfig {
  WorkloadConfig workload = desk_workload();
  std::vector<IndexMode> modes{std::begin(kAllModes), std::end(kAllModes)};
  std::vector<StrategyKind> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  Scenario scenario = Scenario::UnequalRequests;
  std::uint64_t seed = 42;
  std::string output;
  /// Fraction of requests cross-checked against the brute-force oracle.
  double oracle_fraction = 0.01;
  /// Where least-used gets its table: the exact density or observed counts.
  TableOrigin table_origin = TableOrigin::Theoretical;
  /// Datasets benchmarked concurrently.
  std::size_t threads = 1;

  /// Desk-scale workload with slope 1 for the skewed scenarios.
  static WorkloadConfig desk_workload();

  /// Workload with the skew target implied by `scenario`.
  WorkloadConfig scenario_workload() const;
  /// Throws ConfigError.
  void validate() const;
};

/// One aggregated measurement: a metric over one dataset for one
/// (mode, strategy, scenario).
struct BenchRow {
  IndexMode mode = IndexMode::Primary;
  StrategyKind strategy = StrategyKind::Original;
  Scenario scenario = Scenario::EqualProb;
  std::size_t dataset = 0;
  Metric metric = Metric::RetrievalClassesExamined;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t count = 0;
};

/// Repository plus request list for one dataset index.
struct Dataset {
  std::vector<Service> repository;
  std::vector<ParamSet> requests;
};

/// Deterministic in (cfg.seed, d, workload).
Dataset make_dataset(const BenchConfig& cfg, std::size_t d);
std::vector<Dataset> make_datasets(const BenchConfig& cfg);

/// Probability table handed to least-used for this scenario: request-side
/// probabilities unless the skew is on service inputs.
std::shared_ptr<const ProbabilityTable> least_used_table(const BenchConfig& cfg, const Dataset& dataset);

/// Strategy instance for dataset `d`; the random stream depends on (seed, d)
/// only, so every mode sees the same draws.
KeySelector make_selector(const BenchConfig& cfg, StrategyKind kind, std::size_t d, const Dataset& dataset);

/// Thrown when indexed retrieval disagrees with the brute-force oracle.
class OracleMismatchError : public Error {
 public:
  OracleMismatchError(IndexMode mode, StrategyKind strategy, std::size_t dataset, const ParamSet& request);
};

/// Builds every (mode, strategy, dataset) index and times each request.
/// Metrics: retrieval_classes_examined, retrieval_wall_ms.
std::vector<BenchRow> run_retrieval_bench(const BenchConfig& cfg);
std::vector<BenchRow> run_retrieval_bench(const BenchConfig& cfg, std::span<const Dataset> datasets);

/// Adds every service one at a time into an empty index.
/// Metrics: addition_global_scans, addition_wall_ms.
std::vector<BenchRow> run_addition_bench(const BenchConfig& cfg);
std::vector<BenchRow> run_addition_bench(const BenchConfig& cfg, std::span<const Dataset> datasets);

/// Orders rows by (mode, strategy, scenario, dataset, metric).
void sort_rows(std::vector<BenchRow>& rows);

/// Header `mode,strategy,scenario,dataset,metric,mean,stddev,count`.
void write_csv(std::span<const BenchRow> rows, std::ostream& out);
void write_csv(std::span<const BenchRow> rows, const std::filesystem::path& path);
std::vector<BenchRow> read_csv(std::istream& in, const std::string& source = "<csv>");
std::vector<BenchRow> read_csv(const std::filesystem::path& path);

/// Strategies ordered by ascending count-weighted mean over datasets.
std::vector<std::pair<StrategyKind, double>> rank_strategies(std::span<const BenchRow> rows, Scenario scenario,
                                                             IndexMode mode, Metric metric);

/// Per-scenario table: one line per (metric, mode), one column per strategy
/// with its mean and rank.
std::string format_report(std::span<const BenchRow> rows);

/// Applies `key = value` lines (with `#` comments) onto `cfg` and returns the
/// keys that were set. Errors carry the line number.
std::set<std::string> apply_config(std::istream& in, BenchConfig& cfg, const std::string& source = "<config>");
std::set<std::string> apply_config_file(const std::filesystem::path& path, BenchConfig& cfg);
/// Inverse of apply_config for the fields it understands.
void write_config(std::ostream& out, const BenchConfig& cfg);

}  // namespace svcindex
