#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svcindex/key_selection.hpp"
#include "svcindex/random.hpp"
#include "svcindex/types.hpp"

namespace svcindex {

/// What the skewed distribution drives; everything else is uniform.
enum class SkewTarget { None, ServiceInputs, RetrievalRequests };

std::string_view to_string(SkewTarget target);
std::optional<SkewTarget> parse_skew_target(std::string_view text);

/// Linear density f(x) = l (x - q) + q on [0, q), sampled by rejection in the
/// box [0, q) x [0, q). Parameter id = floor(x). For l <= 0, f >= q and every
/// draw is accepted, so the distribution is uniform.
struct DistributionSpec {
  std::size_t q = 300;
  double slope = 0.0;
  SkewTarget target = SkewTarget::None;
  std::uint64_t seed = 0;

  double density(double x) const { return slope * (x - static_cast<double>(q)) + static_cast<double>(q); }
  bool is_uniform() const { return slope <= 0.0; }
  /// Throws ConfigError when q == 0.
  void validate() const;
  /// Set when the slope lies outside [0, 1] but above 0 (low ids never drawn).
  std::optional<std::string> warning() const;
};

struct WorkloadConfig {
  std::size_t n_services = 5000;
  std::size_t inputs_per_service = 6;
  std::size_t outputs_per_service = 6;
  std::size_t request_size = 20;
  std::size_t requests_per_dataset = 200;
  std::size_t n_datasets = 5;
  DistributionSpec distribution;

  /// 50,000 services, q = 1000, 10 in / 10 out, 32-parameter requests,
  /// 20 datasets of 1000 requests.
  static WorkloadConfig paper_scale();
  /// 5,000 services, q = 300, 6 in / 6 out, 20-parameter requests,
  /// 5 datasets of 200 requests.
  static WorkloadConfig desk_scale();

  /// Throws ConfigError when set sizes exceed the drawable universe.
  void validate() const;
};

/// One draw of the rejection sampler (always the skewed density, whatever
/// `spec.target` says).
ParamId sample_parameter(const DistributionSpec& spec, RandomStream& stream);

/// Exact per-id acceptance probability: integral of clamp(f, 0, q) over
/// [i, i+1) divided by its integral over [0, q).
ProbabilityTable theoretical_probabilities(const DistributionSpec& spec);

/// Services 0..n-1; inputs follow the skew when the target is ServiceInputs,
/// outputs are always uniform. Duplicate ids within one set are redrawn.
std::vector<Service> generate_repository(const WorkloadConfig& cfg, RandomStream& stream);

/// One dataset of `requests_per_dataset` requests of `request_size` distinct ids.
std::vector<ParamSet> generate_request_dataset(const WorkloadConfig& cfg, RandomStream& stream);

/// `n_datasets` datasets; dataset d draws from its own stream derived from a
/// base seed taken from `stream` and d.
std::vector<std::vector<ParamSet>> generate_requests(const WorkloadConfig& cfg, RandomStream& stream);

}  // namespace svcindex
