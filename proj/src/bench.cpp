#include "svcindex/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace svcindex {

// ---------------------------------------------------------------------------
// Enums
// ---------------------------------------------------------------------------

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::EqualProb: return "equal-prob";
    case Scenario::UnequalInputs: return "unequal-inputs";
    case Scenario::UnequalRequests: return "unequal-requests";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  for (Scenario s : kAllScenarios) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

SkewTarget skew_target(Scenario scenario) {
  switch (scenario) {
    case Scenario::EqualProb: return SkewTarget::None;
    case Scenario::UnequalInputs: return SkewTarget::ServiceInputs;
    case Scenario::UnequalRequests: return SkewTarget::RetrievalRequests;
  }
  return SkewTarget::None;
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::RetrievalClassesExamined: return "retrieval_classes_examined";
    case Metric::RetrievalWallMs: return "retrieval_wall_ms";
    case Metric::AdditionGlobalScans: return "addition_global_scans";
    case Metric::AdditionWallMs: return "addition_wall_ms";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view text) {
  for (Metric m : {Metric::RetrievalClassesExamined, Metric::RetrievalWallMs, Metric::AdditionGlobalScans,
                   Metric::AdditionWallMs}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

bool is_wall_time(Metric metric) { return metric == Metric::RetrievalWallMs || metric == Metric::AdditionWallMs; }

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

WorkloadConfig BenchConfig::desk_workload() {
  auto wl = WorkloadConfig::desk_scale();
  wl.distribution.slope = 1.0;
  return wl;
}

WorkloadConfig BenchConfig::scenario_workload() const {
  WorkloadConfig wl = workload;
  wl.distribution.target = skew_target(scenario);
  wl.distribution.seed = seed;
  return wl;
}

void BenchConfig::validate() const {
  if (modes.empty()) throw ConfigError("no index modes selected");
  if (strategies.empty()) throw ConfigError("no key selection strategies selected");
  if (workload.distribution.target != SkewTarget::None && workload.distribution.target != skew_target(scenario)) {
    throw ConfigError("target '" + std::string(to_string(workload.distribution.target)) +
                      "' contradicts scenario '" + std::string(to_string(scenario)) + "'");
  }
  if (!(oracle_fraction >= 0.0 && oracle_fraction <= 1.0)) throw ConfigError("oracle_fraction must lie in [0, 1]");
  if (threads == 0) throw ConfigError("threads must be at least 1");
  scenario_workload().validate();
}

// ---------------------------------------------------------------------------
// Datasets and strategies
// ---------------------------------------------------------------------------

namespace {

enum StreamTag : std::uint64_t { kRepositoryStream = 1, kRequestStream = 2, kSelectorStream = 3 };

}  // namespace

Dataset make_dataset(const BenchConfig& cfg, std::size_t d) {
  const WorkloadConfig wl = cfg.scenario_workload();
  RandomStream repo(RandomStream::derive(cfg.seed, d, kRepositoryStream));
  RandomStream req(RandomStream::derive(cfg.seed, d, kRequestStream));
  Dataset out;
  out.repository = generate_repository(wl, repo);
  out.requests = generate_request_dataset(wl, req);
  return out;
}

std::vector<Dataset> make_datasets(const BenchConfig& cfg) {
  std::vector<Dataset> out;
  out.reserve(cfg.workload.n_datasets);
  for (std::size_t d = 0; d < cfg.workload.n_datasets; ++d) out.push_back(make_dataset(cfg, d));
  return out;
}

namespace {

ProbabilitySource least_used_source(Scenario scenario) {
  return scenario == Scenario::UnequalInputs ? ProbabilitySource::InputDistribution
                                             : ProbabilitySource::RequestDistribution;
}

}  // namespace

std::shared_ptr<const ProbabilityTable> least_used_table(const BenchConfig& cfg, const Dataset& dataset) {
  const WorkloadConfig wl = cfg.scenario_workload();
  const ProbabilitySource source = least_used_source(cfg.scenario);
  if (cfg.table_origin == TableOrigin::Empirical) {
    if (source == ProbabilitySource::RequestDistribution) {
      return std::make_shared<ProbabilityTable>(ProbabilityTable::empirical(dataset.requests, wl.distribution.q));
    }
    std::vector<ParamSet> inputs;
    inputs.reserve(dataset.repository.size());
    for (const Service& s : dataset.repository) inputs.push_back(s.inputs);
    return std::make_shared<ProbabilityTable>(ProbabilityTable::empirical(inputs, wl.distribution.q));
  }
  // The skewed density only governs the side named by the scenario.
  DistributionSpec spec = wl.distribution;
  if (spec.target == SkewTarget::None) spec.slope = 0.0;
  return std::make_shared<ProbabilityTable>(theoretical_probabilities(spec));
}

KeySelector make_selector(const BenchConfig& cfg, StrategyKind kind, std::size_t d, const Dataset& dataset) {
  std::shared_ptr<const ProbabilityTable> table;
  if (kind == StrategyKind::LeastUsed) table = least_used_table(cfg, dataset);
  return KeySelector(kind, RandomStream::derive(cfg.seed, d, kSelectorStream), std::move(table),
                     least_used_source(cfg.scenario));
}

OracleMismatchError::OracleMismatchError(IndexMode mode, StrategyKind strategy, std::size_t dataset,
                                         const ParamSet& request)
    : Error("oracle mismatch in " + std::string(to_string(mode)) + "/" + std::string(to_string(strategy)) +
            " dataset " + std::to_string(dataset) + " for request " + to_string(request)) {}

// ---------------------------------------------------------------------------
// Benchmarks
// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0, Clock::time_point t1) {
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

BenchRow summarize(IndexMode mode, StrategyKind strategy, Scenario scenario, std::size_t dataset, Metric metric,
                   const std::vector<double>& samples) {
  BenchRow row{mode, strategy, scenario, dataset, metric, 0.0, 0.0, samples.size()};
  if (samples.empty()) return row;
  double sum = 0.0;
  for (double x : samples) sum += x;
  row.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - row.mean) * (x - row.mean);
    row.stddev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  return row;
}

std::size_t oracle_stride(double fraction) {
  if (fraction <= 0.0) return 0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / fraction)));
}

template <typename PerDataset>
std::vector<BenchRow> run_datasets(const BenchConfig& cfg, std::span<const Dataset> datasets, PerDataset body) {
  std::vector<std::vector<BenchRow>> parts(datasets.size());
  if (cfg.threads <= 1) {
    for (std::size_t d = 0; d < datasets.size(); ++d) parts[d] = body(d, datasets[d]);
  } else {
    for (std::size_t start = 0; start < datasets.size(); start += cfg.threads) {
      std::vector<std::future<std::vector<BenchRow>>> running;
      const std::size_t stop = std::min(datasets.size(), start + cfg.threads);
      for (std::size_t d = start; d < stop; ++d) {
        running.push_back(std::async(std::launch::async, [&, d] { return body(d, datasets[d]); }));
      }
      for (std::size_t d = start; d < stop; ++d) parts[d] = running[d - start].get();
    }
  }
  std::vector<BenchRow> rows;
  for (auto& part : parts) rows.insert(rows.end(), part.begin(), part.end());
  sort_rows(rows);
  return rows;
}

}  // namespace

std::vector<BenchRow> run_retrieval_bench(const BenchConfig& cfg) {
  cfg.validate();
  const auto datasets = make_datasets(cfg);
  return run_retrieval_bench(cfg, datasets);
}

std::vector<BenchRow> run_retrieval_bench(const BenchConfig& cfg, std::span<const Dataset> datasets) {
  cfg.validate();
  const std::size_t stride = oracle_stride(cfg.oracle_fraction);
  return run_datasets(cfg, datasets, [&](std::size_t d, const Dataset& data) {
    std::vector<std::optional<std::vector<ServiceId>>> expected(data.requests.size());
    if (stride > 0) {
      for (std::size_t i = 0; i < data.requests.size(); i += stride) {
        expected[i] = brute_force_retrieve(data.repository, data.requests[i]);
      }
    }
    std::vector<BenchRow> rows;
    for (IndexMode mode : cfg.modes) {
      for (StrategyKind kind : cfg.strategies) {
        KeySelector selector = make_selector(cfg, kind, d, data);
        const IndexModel index = build_index(data.repository, mode, selector);
        std::vector<double> examined, wall;
        examined.reserve(data.requests.size());
        wall.reserve(data.requests.size());
        for (std::size_t i = 0; i < data.requests.size(); ++i) {
          const auto t0 = Clock::now();
          const RetrievalResult result = retrieve(index, data.requests[i]);
          const auto t1 = Clock::now();
          examined.push_back(static_cast<double>(result.stats.classes_examined));
          wall.push_back(elapsed_ms(t0, t1));
          if (expected[i] && *expected[i] != result.services) {
            throw OracleMismatchError(mode, kind, d, data.requests[i]);
          }
        }
        rows.push_back(summarize(mode, kind, cfg.scenario, d, Metric::RetrievalClassesExamined, examined));
        rows.push_back(summarize(mode, kind, cfg.scenario, d, Metric::RetrievalWallMs, wall));
      }
    }
    return rows;
  });
}

std::vector<BenchRow> run_addition_bench(const BenchConfig& cfg) {
  cfg.validate();
  const auto datasets = make_datasets(cfg);
  return run_addition_bench(cfg, datasets);
}

std::vector<BenchRow> run_addition_bench(const BenchConfig& cfg, std::span<const Dataset> datasets) {
  cfg.validate();
  return run_datasets(cfg, datasets, [&](std::size_t d, const Dataset& data) {
    std::vector<BenchRow> rows;
    for (IndexMode mode : cfg.modes) {
      for (StrategyKind kind : cfg.strategies) {
        KeySelector selector = make_selector(cfg, kind, d, data);
        IndexModel index(mode);
        std::vector<double> scans, wall;
        scans.reserve(data.repository.size());
        wall.reserve(data.repository.size());
        for (const Service& s : data.repository) {
          const auto t0 = Clock::now();
          const AddStats stats = add_service(index, s, selector);
          const auto t1 = Clock::now();
          scans.push_back(static_cast<double>(stats.global_scans));
          wall.push_back(elapsed_ms(t0, t1));
        }
        rows.push_back(summarize(mode, kind, cfg.scenario, d, Metric::AdditionGlobalScans, scans));
        rows.push_back(summarize(mode, kind, cfg.scenario, d, Metric::AdditionWallMs, wall));
      }
    }
    return rows;
  });
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

auto row_key(const BenchRow& r) {
  return std::make_tuple(static_cast<int>(r.mode), static_cast<int>(r.strategy), static_cast<int>(r.scenario),
                         r.dataset, static_cast<int>(r.metric));
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

constexpr std::string_view kCsvHeader = "mode,strategy,scenario,dataset,metric,mean,stddev,count";

}  // namespace

void sort_rows(std::vector<BenchRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) { return row_key(a) < row_key(b); });
}

void write_csv(std::span<const BenchRow> rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const BenchRow& r : rows) {
    out << to_string(r.mode) << ',' << to_string(r.strategy) << ',' << to_string(r.scenario) << ',' << r.dataset
        << ',' << to_string(r.metric) << ',' << format_double(r.mean) << ',' << format_double(r.stddev) << ','
        << r.count << '\n';
  }
}

void write_csv(std::span<const BenchRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<BenchRow> read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError(source, 1, "missing CSV header");
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 8) throw ParseError(source, lineno, "expected 8 fields");
    BenchRow r;
    auto mode = parse_index_mode(f[0]);
    auto strategy = parse_strategy(f[1]);
    auto scenario = parse_scenario(f[2]);
    auto metric = parse_metric(f[4]);
    if (!mode || !strategy || !scenario || !metric) throw ParseError(source, lineno, "unknown enum value");
    r.mode = *mode;
    r.strategy = *strategy;
    r.scenario = *scenario;
    r.metric = *metric;
    try {
      std::size_t used = 0;
      r.dataset = std::stoull(f[3], &used);
      r.mean = std::stod(f[5]);
      r.stddev = std::stod(f[6]);
      r.count = std::stoull(f[7]);
    } catch (const std::exception&) {
      throw ParseError(source, lineno, "bad number");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<BenchRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return read_csv(in, path.string());
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

std::vector<std::pair<StrategyKind, double>> rank_strategies(std::span<const BenchRow> rows, Scenario scenario,
                                                             IndexMode mode, Metric metric) {
  std::map<StrategyKind, std::pair<double, double>> acc;  // weighted sum, weight
  for (const BenchRow& r : rows) {
    if (r.scenario != scenario || r.mode != mode || r.metric != metric) continue;
    auto& [sum, weight] = acc[r.strategy];
    sum += r.mean * static_cast<double>(r.count);
    weight += static_cast<double>(r.count);
  }
  std::vector<std::pair<StrategyKind, double>> out;
  for (const auto& [kind, sw] : acc) out.emplace_back(kind, sw.second > 0 ? sw.first / sw.second : 0.0);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

std::string format_report(std::span<const BenchRow> rows) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (Scenario scenario : kAllScenarios) {
    bool scenario_seen = false;
    for (Metric metric : {Metric::RetrievalClassesExamined, Metric::RetrievalWallMs, Metric::AdditionGlobalScans,
                          Metric::AdditionWallMs}) {
      bool metric_seen = false;
      for (IndexMode mode : kAllModes) {
        const auto ranking = rank_strategies(rows, scenario, mode, metric);
        if (ranking.empty()) continue;
        if (!scenario_seen) {
          os << "scenario " << to_string(scenario) << '\n';
          scenario_seen = true;
        }
        if (!metric_seen) {
          os << "  " << to_string(metric) << '\n';
          os << "    " << std::left << std::setw(9) << "mode";
          for (StrategyKind k : kAllStrategies) os << std::setw(20) << to_string(k);
          os << '\n';
          metric_seen = true;
        }
        os << "    " << std::setw(9) << to_string(mode);
        for (StrategyKind k : kAllStrategies) {
          auto it = std::find_if(ranking.begin(), ranking.end(), [k](const auto& e) { return e.first == k; });
          std::ostringstream cell;
          cell << std::fixed << std::setprecision(3);
          if (it == ranking.end()) {
            cell << '-';
          } else {
            cell << it->second << " (#" << (it - ranking.begin() + 1) << ')';
          }
          os << std::setw(20) << cell.str();
        }
        os << '\n';
      }
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t to_size(const std::string& v) {
  std::size_t used = 0;
  if (v.empty() || v.front() == '-') throw std::invalid_argument(v);
  const auto x = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return static_cast<std::size_t>(x);
}

double to_real(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

}  // namespace

std::set<std::string> apply_config(std::istream& in, BenchConfig& cfg, const std::string& source) {
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto fail = [&](const std::string& why) { throw ParseError(source, lineno, key + ": " + why); };
    seen.insert(key);
    try {
      auto& wl = cfg.workload;
      if (key == "scale") {
        const double slope = wl.distribution.slope;
        if (value == "desk") {
          wl = WorkloadConfig::desk_scale();
        } else if (value == "paper") {
          wl = WorkloadConfig::paper_scale();
        } else {
          fail("expected desk or paper");
        }
        wl.distribution.slope = slope;
      } else if (key == "n_services") {
        wl.n_services = to_size(value);
      } else if (key == "inputs_per_service") {
        wl.inputs_per_service = to_size(value);
      } else if (key == "outputs_per_service") {
        wl.outputs_per_service = to_size(value);
      } else if (key == "request_size") {
        wl.request_size = to_size(value);
      } else if (key == "requests_per_dataset") {
        wl.requests_per_dataset = to_size(value);
      } else if (key == "n_datasets") {
        wl.n_datasets = to_size(value);
      } else if (key == "q") {
        wl.distribution.q = to_size(value);
      } else if (key == "l" || key == "slope") {
        wl.distribution.slope = to_real(value);
      } else if (key == "target") {
        auto t = parse_skew_target(value);
        if (!t) fail("unknown target '" + value + "'");
        wl.distribution.target = *t;
      } else if (key == "seed") {
        cfg.seed = to_size(value);
      } else if (key == "scenario") {
        auto s = parse_scenario(value);
        if (!s) fail("unknown scenario '" + value + "'");
        cfg.scenario = *s;
      } else if (key == "modes") {
        cfg.modes.clear();
        for (const auto& item : split_list(value)) {
          auto m = parse_index_mode(item);
          if (!m) fail("unknown mode '" + item + "'");
          cfg.modes.push_back(*m);
        }
      } else if (key == "strategies") {
        cfg.strategies.clear();
        for (const auto& item : split_list(value)) {
          auto k = parse_strategy(item);
          if (!k) fail("unknown strategy '" + item + "'");
          cfg.strategies.push_back(*k);
        }
      } else if (key == "output") {
        cfg.output = value;
      } else if (key == "oracle_fraction") {
        cfg.oracle_fraction = to_real(value);
      } else if (key == "table") {
        if (value == "theoretical") {
          cfg.table_origin = TableOrigin::Theoretical;
        } else if (value == "empirical") {
          cfg.table_origin = TableOrigin::Empirical;
        } else {
          fail("expected theoretical or empirical");
        }
      } else if (key == "threads") {
        cfg.threads = to_size(value);
      } else {
        fail("unknown key");
      }
    } catch (const std::invalid_argument&) {
      fail("bad value '" + value + "'");
    } catch (const std::out_of_range&) {
      fail("value out of range '" + value + "'");
    }
  }
  return seen;
}

std::set<std::string> apply_config_file(const std::filesystem::path& path, BenchConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  return apply_config(in, cfg, path.string());
}

void write_config(std::ostream& out, const BenchConfig& cfg) {
  const auto& wl = cfg.workload;
  auto join = [](const auto& items) {
    std::string s;
    for (const auto& item : items) {
      if (!s.empty()) s += ',';
      s += to_string(item);
    }
    return s;
  };
  out << "n_services = " << wl.n_services << '\n'
      << "inputs_per_service = " << wl.inputs_per_service << '\n'
      << "outputs_per_service = " << wl.outputs_per_service << '\n'
      << "request_size = " << wl.request_size << '\n'
      << "requests_per_dataset = " << wl.requests_per_dataset << '\n'
      << "n_datasets = " << wl.n_datasets << '\n'
      << "q = " << wl.distribution.q << '\n'
      << "l = " << format_double(wl.distribution.slope) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "scenario = " << to_string(cfg.scenario) << '\n'
      << "modes = " << join(cfg.modes) << '\n'
      << "strategies = " << join(cfg.strategies) << '\n'
      << "oracle_fraction = " << format_double(cfg.oracle_fraction) << '\n'
      << "table = " << (cfg.table_origin == TableOrigin::Theoretical ? "theoretical" : "empirical") << '\n'
      << "threads = " << cfg.threads << '\n';
  if (!cfg.output.empty()) out << "output = " << cfg.output << '\n';
}

}  // namespace svcindex
