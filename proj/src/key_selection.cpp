#include "svcindex/key_selection.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace svcindex {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Original: return "original";
    case StrategyKind::MinCount: return "min-count";
    case StrategyKind::MaxCount: return "max-count";
    case StrategyKind::Random: return "random";
    case StrategyKind::Designated: return "designated";
    case StrategyKind::LeastUsed: return "least-used";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view text) {
  for (StrategyKind k : kAllStrategies) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ProbabilityTable
// ---------------------------------------------------------------------------

ProbabilityTable::ProbabilityTable(std::vector<double> probs, TableOrigin origin)
    : probs_(std::move(probs)), origin_(origin) {
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("probability of parameter " + std::to_string(i) + " is outside [0, 1]");
    }
  }
  if (origin_ == TableOrigin::Theoretical && std::abs(sum() - 1.0) > 1e-9) {
    throw ConfigError("theoretical probability table does not sum to 1");
  }
}

ProbabilityTable ProbabilityTable::uniform(std::size_t q) {
  if (q == 0) throw ConfigError("parameter universe is empty");
  return ProbabilityTable(std::vector<double>(q, 1.0 / static_cast<double>(q)), TableOrigin::Theoretical);
}

ProbabilityTable ProbabilityTable::empirical(std::span<const ParamSet> observations, std::size_t q) {
  std::vector<double> counts(q, 0.0);
  double total = 0.0;
  for (const ParamSet& set : observations) {
    for (ParamId id : set) {
      if (id >= q) throw ConfigError("parameter " + std::to_string(id) + " is outside the universe");
      counts[id] += 1.0;
      total += 1.0;
    }
  }
  if (total > 0.0) {
    for (double& c : counts) c /= total;
  }
  return ProbabilityTable(std::move(counts), TableOrigin::Empirical);
}

double ProbabilityTable::at(ParamId id) const {
  if (!contains(id)) {
    throw ConfigError("probability table has no entry for parameter " + std::to_string(id));
  }
  return probs_[id];
}

double ProbabilityTable::sum() const {
  // Kahan summation; q can reach the thousands and the 1e-9 check is tight.
  double s = 0.0, c = 0.0;
  for (double p : probs_) {
    const double y = p - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

ProbabilityTable read_probability_table(std::istream& in, TableOrigin origin, const std::string& source) {
  std::vector<double> probs;
  std::vector<bool> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    long long id;
    double p;
    if (!(row >> id)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ParseError(source, lineno, "expected '<param_id> <probability>'");
    }
    if (!(row >> p)) throw ParseError(source, lineno, "missing probability");
    std::string extra;
    if (row >> extra) throw ParseError(source, lineno, "trailing text '" + extra + "'");
    if (id < 0 || id > std::numeric_limits<ParamId>::max()) {
      throw ParseError(source, lineno, "parameter id out of range");
    }
    const auto uid = static_cast<std::size_t>(id);
    if (uid >= probs.size()) {
      probs.resize(uid + 1, 0.0);
      seen.resize(uid + 1, false);
    }
    if (seen[uid]) throw ParseError(source, lineno, "duplicate parameter " + std::to_string(uid));
    seen[uid] = true;
    probs[uid] = p;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ParseError(source, 0, "no entry for parameter " + std::to_string(i));
  }
  try {
    return ProbabilityTable(std::move(probs), origin);
  } catch (const ConfigError& e) {
    throw ParseError(source, 0, e.what());
  }
}

void write_probability_table(std::ostream& out, const ProbabilityTable& table) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < table.size(); ++i) out << i << ' ' << table.values()[i] << '\n';
  out.precision(old);
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

const InputSimilarClass* scan_for_equal_inputs(const IndexModel& index, const ParamSet& inputs,
                                               AddStats* stats) {
  if (index.mode() == IndexMode::Primary) return nullptr;
  for (const InputSimilarClass& isc : index.input_similar_classes()) {
    if (stats) ++stats->global_scans;
    if (isc.inputs == inputs) return &isc;
  }
  return nullptr;
}

namespace {

ParamId random_input(const Service& s, RandomStream& stream) { return s.inputs[stream.index(s.inputs.size())]; }

// Primary indexes have no R2; the service count plays the role of m there.
std::size_t class_universe(const IndexModel& index) {
  return index.mode() == IndexMode::Primary ? index.service_count() : index.input_similar_count();
}

}  // namespace

ParamId select_key_original(const Service& s, const IndexModel& index, RandomStream& stream, AddStats* stats) {
  validate_service(s);
  if (const auto* same = scan_for_equal_inputs(index, s.inputs, stats)) return same->key;

  const double bound = std::sqrt(static_cast<double>(class_universe(index)));
  std::optional<ParamId> best;
  std::size_t best_size = 0;
  for (ParamId a : s.inputs) {
    const std::size_t size = index.key_class_size(a);
    if (size == 0 || !(static_cast<double>(size) < bound)) continue;
    if (!best || size > best_size) {
      best = a;
      best_size = size;
    }
  }
  return best ? *best : random_input(s, stream);
}

ParamId select_key_min_count(const Service& s, const IndexModel& index, RandomStream& stream, AddStats* stats) {
  validate_service(s);
  if (const auto* same = scan_for_equal_inputs(index, s.inputs, stats)) return same->key;

  std::optional<ParamId> best;
  std::size_t best_size = 0;
  for (ParamId a : s.inputs) {
    const std::size_t size = index.key_class_size(a);
    if (size == 0) continue;
    if (!best || size < best_size) {
      best = a;
      best_size = size;
    }
  }
  return best ? *best : random_input(s, stream);
}

ParamId select_key_max_count(const Service& s, const IndexModel& index, RandomStream& stream, AddStats* stats) {
  validate_service(s);
  if (const auto* same = scan_for_equal_inputs(index, s.inputs, stats)) return same->key;

  for (ParamId a : s.inputs) {
    if (!index.find_key_class(a)) return a;
  }
  return random_input(s, stream);
}

ParamId select_key_random(const Service& s, const IndexModel& index, RandomStream& stream, AddStats* stats) {
  validate_service(s);
  if (const auto* same = scan_for_equal_inputs(index, s.inputs, stats)) return same->key;
  return random_input(s, stream);
}

ParamId select_key_designated(const Service& s) {
  validate_service(s);
  std::uint64_t sum = 0;
  for (ParamId a : s.inputs) sum += a;
  return s.inputs[static_cast<std::size_t>(sum % s.inputs.size())];
}

ParamId select_key_least_used(const Service& s, const ProbabilityTable& table) {
  validate_service(s);
  ParamId key = s.inputs[0];
  double key_p = table.at(key);
  for (ParamId a : s.inputs) {
    const double p = table.at(a);
    // Strict comparison keeps the earliest (smallest) id on ties.
    if (p < key_p) {
      key = a;
      key_p = p;
    }
  }
  return key;
}

double expected_search_cost(std::span<const double> sizes, std::span<const double> probs) {
  if (sizes.size() != probs.size()) {
    throw std::invalid_argument("sizes and probabilities differ in length");
  }
  double total_p = 0.0;
  double y = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] >= 0.0)) throw std::invalid_argument("class sizes must be non-negative");
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
    total_p += probs[i];
    y += probs[i] * sizes[i];
  }
  if (std::abs(total_p - 1.0) > 1e-9) throw std::invalid_argument("probabilities must sum to 1");
  return y;
}

// ---------------------------------------------------------------------------
// KeySelector
// ---------------------------------------------------------------------------

KeySelector::KeySelector(StrategyKind kind, std::uint64_t seed, std::shared_ptr<const ProbabilityTable> table,
                         ProbabilitySource source)
    : kind_(kind), stream_(seed), table_(std::move(table)), source_(source) {}

void KeySelector::require_ready() const {
  if (kind_ == StrategyKind::LeastUsed && !table_) {
    throw ConfigError("least-used key selection requires a probability table");
  }
}

ParamId KeySelector::select(const Service& s, const IndexModel& index, AddStats& stats) {
  switch (kind_) {
    case StrategyKind::Original: return select_key_original(s, index, stream_, &stats);
    case StrategyKind::MinCount: return select_key_min_count(s, index, stream_, &stats);
    case StrategyKind::MaxCount: return select_key_max_count(s, index, stream_, &stats);
    case StrategyKind::Random: return select_key_random(s, index, stream_, &stats);
    case StrategyKind::Designated: return select_key_designated(s);
    case StrategyKind::LeastUsed:
      require_ready();
      return select_key_least_used(s, *table_);
  }
  throw ConfigError("unknown strategy");
}

}  // namespace svcindex
