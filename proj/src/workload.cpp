#include "svcindex/workload.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace svcindex {

std::string_view to_string(SkewTarget target) {
  switch (target) {
    case SkewTarget::None: return "none";
    case SkewTarget::ServiceInputs: return "service-inputs";
    case SkewTarget::RetrievalRequests: return "retrieval-requests";
  }
  return "?";
}

std::optional<SkewTarget> parse_skew_target(std::string_view text) {
  if (text == "none") return SkewTarget::None;
  if (text == "service-inputs") return SkewTarget::ServiceInputs;
  if (text == "retrieval-requests") return SkewTarget::RetrievalRequests;
  return std::nullopt;
}

void DistributionSpec::validate() const {
  if (q == 0) throw ConfigError("parameter universe size q must be at least 1");
  if (!std::isfinite(slope)) throw ConfigError("slope must be finite");
}

std::optional<std::string> DistributionSpec::warning() const {
  if (slope > 1.0) {
    std::ostringstream os;
    os << "slope " << slope << " > 1: f(x) is negative below x = " << (1.0 - 1.0 / slope) * static_cast<double>(q)
       << " and those ids are never drawn";
    return os.str();
  }
  return std::nullopt;
}

WorkloadConfig WorkloadConfig::paper_scale() {
  WorkloadConfig cfg;
  cfg.n_services = 50000;
  cfg.inputs_per_service = 10;
  cfg.outputs_per_service = 10;
  cfg.request_size = 32;
  cfg.requests_per_dataset = 1000;
  cfg.n_datasets = 20;
  cfg.distribution.q = 1000;
  return cfg;
}

WorkloadConfig WorkloadConfig::desk_scale() {
  WorkloadConfig cfg;
  cfg.n_services = 5000;
  cfg.inputs_per_service = 6;
  cfg.outputs_per_service = 6;
  cfg.request_size = 20;
  cfg.requests_per_dataset = 200;
  cfg.n_datasets = 5;
  cfg.distribution.q = 300;
  return cfg;
}

namespace {

// Integral of clamp(a + b x, 0, cap) over [lo, hi].
double integrate_clamped_linear(double a, double b, double cap, double lo, double hi) {
  std::vector<double> cuts{lo, hi};
  if (b != 0.0) {
    for (double level : {0.0, cap}) {
      const double x = (level - a) / b;
      if (x > lo && x < hi) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double x0 = cuts[i], x1 = cuts[i + 1];
    const double mid = a + b * 0.5 * (x0 + x1);
    if (mid <= 0.0) continue;
    if (mid >= cap) {
      total += cap * (x1 - x0);
    } else {
      total += a * (x1 - x0) + 0.5 * b * (x1 * x1 - x0 * x0);
    }
  }
  return total;
}

std::size_t drawable_ids(const DistributionSpec& spec) {
  const auto table = theoretical_probabilities(spec);
  return static_cast<std::size_t>(
      std::count_if(table.values().begin(), table.values().end(), [](double p) { return p > 0.0; }));
}

ParamId draw_id(const DistributionSpec& spec, bool skewed, RandomStream& stream) {
  return skewed ? sample_parameter(spec, stream) : static_cast<ParamId>(stream.index(spec.q));
}

std::vector<ParamId> draw_distinct(const DistributionSpec& spec, bool skewed, std::size_t count,
                                   RandomStream& stream) {
  std::vector<ParamId> out;
  out.reserve(count);
  while (out.size() < count) {
    const ParamId id = draw_id(spec, skewed, stream);
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

}  // namespace

ParamId sample_parameter(const DistributionSpec& spec, RandomStream& stream) {
  const double q = static_cast<double>(spec.q);
  for (;;) {
    const double x = stream.uniform(0.0, q);
    const double y = stream.uniform(0.0, q);
    if (y <= spec.density(x)) {
      // q * u can round up to q for u just below 1.
      return static_cast<ParamId>(std::min(static_cast<std::size_t>(x), spec.q - 1));
    }
  }
}

ProbabilityTable theoretical_probabilities(const DistributionSpec& spec) {
  spec.validate();
  const double q = static_cast<double>(spec.q);
  if (spec.is_uniform()) return ProbabilityTable::uniform(spec.q);

  const double a = q * (1.0 - spec.slope);
  const double b = spec.slope;
  std::vector<double> probs(spec.q);
  double total = 0.0;
  for (std::size_t i = 0; i < spec.q; ++i) {
    probs[i] = integrate_clamped_linear(a, b, q, static_cast<double>(i), static_cast<double>(i + 1));
    total += probs[i];
  }
  if (!(total > 0.0)) throw ConfigError("density has no positive mass on [0, q)");
  for (double& p : probs) p /= total;
  // Absorb the last rounding residue so the table sums to 1 as tightly as possible.
  double residual = 1.0;
  for (double p : probs) residual -= p;
  probs.back() = std::clamp(probs.back() + residual, 0.0, 1.0);
  return ProbabilityTable(std::move(probs), TableOrigin::Theoretical);
}

void WorkloadConfig::validate() const {
  distribution.validate();
  const std::size_t q = distribution.q;
  if (inputs_per_service == 0) throw ConfigError("inputs_per_service must be at least 1");
  if (inputs_per_service > q) throw ConfigError("inputs_per_service exceeds q");
  if (outputs_per_service > q) throw ConfigError("outputs_per_service exceeds q");
  if (request_size > q) throw ConfigError("request_size exceeds q");
  if (distribution.target != SkewTarget::None && !distribution.is_uniform()) {
    const std::size_t needed =
        distribution.target == SkewTarget::ServiceInputs ? inputs_per_service : request_size;
    if (needed > drawable_ids(distribution)) {
      throw ConfigError("slope leaves fewer drawable ids than one set needs");
    }
  }
}

std::vector<Service> generate_repository(const WorkloadConfig& cfg, RandomStream& stream) {
  cfg.validate();
  const bool skew_inputs = cfg.distribution.target == SkewTarget::ServiceInputs;
  std::vector<Service> out;
  out.reserve(cfg.n_services);
  for (std::size_t i = 0; i < cfg.n_services; ++i) {
    Service s;
    s.id = i;
    s.inputs = ParamSet(draw_distinct(cfg.distribution, skew_inputs, cfg.inputs_per_service, stream));
    s.outputs = ParamSet(draw_distinct(cfg.distribution, false, cfg.outputs_per_service, stream));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ParamSet> generate_request_dataset(const WorkloadConfig& cfg, RandomStream& stream) {
  cfg.validate();
  const bool skewed = cfg.distribution.target == SkewTarget::RetrievalRequests;
  std::vector<ParamSet> out;
  out.reserve(cfg.requests_per_dataset);
  for (std::size_t r = 0; r < cfg.requests_per_dataset; ++r) {
    out.emplace_back(draw_distinct(cfg.distribution, skewed, cfg.request_size, stream));
  }
  return out;
}

std::vector<std::vector<ParamSet>> generate_requests(const WorkloadConfig& cfg, RandomStream& stream) {
  const std::uint64_t base = stream.next();
  std::vector<std::vector<ParamSet>> out;
  out.reserve(cfg.n_datasets);
  for (std::size_t d = 0; d < cfg.n_datasets; ++d) {
    RandomStream ds(RandomStream::derive(base, d));
    out.push_back(generate_request_dataset(cfg, ds));
  }
  return out;
}

}  // namespace svcindex
