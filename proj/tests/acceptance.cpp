// Acceptance suite: one PASS/FAIL line per criterion, desk-scale workload.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "svcindex/bench.hpp"
#include "svcindex/cli.hpp"
#include "test_support.hpp"

using namespace svcindex;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s [%2d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double x, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << x;
  return os.str();
}

BenchConfig desk(Scenario scenario) {
  BenchConfig cfg;
  cfg.scenario = scenario;
  cfg.seed = 42;
  cfg.threads = 5;
  return cfg;
}

// Retrieval rows per scenario, computed once. Every request is checked
// against the brute-force oracle while the rows are produced.
struct RetrievalRun {
  std::vector<BenchRow> rows;
  std::string error;
};

std::map<Scenario, RetrievalRun>& retrieval_runs() {
  static std::map<Scenario, RetrievalRun> runs = [] {
    std::map<Scenario, RetrievalRun> out;
    for (Scenario s : kAllScenarios) {
      BenchConfig cfg = desk(s);
      cfg.oracle_fraction = 1.0;
      try {
        out[s].rows = run_retrieval_bench(cfg);
      } catch (const std::exception& e) {
        out[s].error = e.what();
      }
    }
    return out;
  }();
  return runs;
}

double mean_of(const std::vector<std::pair<StrategyKind, double>>& ranked, StrategyKind k) {
  for (auto [kind, v] : ranked)
    if (kind == k) return v;
  return NAN;
}

Outcome balanced(Scenario scenario) {
  const auto& run = retrieval_runs().at(scenario);
  if (!run.error.empty()) return {false, run.error};
  Outcome o{true, ""};
  for (IndexMode mode : kAllModes) {
    const auto ranked = rank_strategies(run.rows, scenario, mode, Metric::RetrievalClassesExamined);
    const double ratio = ranked.back().second / ranked.front().second;
    o.pass = o.pass && ratio <= 1.25;
    o.detail += std::string(to_string(mode)) + " max/min=" + fmt(ratio) + " ";
  }
  o.detail += "(bound 1.25)";
  return o;
}

Outcome oracle_equivalence() {
  std::size_t checked = 0;
  for (Scenario s : kAllScenarios) {
    const auto& run = retrieval_runs().at(s);
    if (!run.error.empty()) return {false, run.error};
    for (const auto& r : run.rows)
      if (r.metric == Metric::RetrievalClassesExamined) checked += r.count;
  }
  return {checked > 0, "0 mismatches over " + std::to_string(checked) + " (mode, strategy, request) retrievals"};
}

Outcome least_used_smallest() {
  const Scenario s = Scenario::UnequalRequests;
  const auto& run = retrieval_runs().at(s);
  if (!run.error.empty()) return {false, run.error};
  Outcome o{true, ""};
  // Per (mode, dataset): least-used strictly below every other strategy.
  std::map<std::pair<IndexMode, std::size_t>, std::map<StrategyKind, double>> cell;
  for (const auto& r : run.rows)
    if (r.metric == Metric::RetrievalClassesExamined) cell[{r.mode, r.dataset}][r.strategy] = r.mean;
  std::size_t strict = 0;
  for (const auto& [key, by_kind] : cell) {
    const double lu = by_kind.at(StrategyKind::LeastUsed);
    bool ok = true;
    for (auto [k, v] : by_kind)
      if (k != StrategyKind::LeastUsed && !(lu < v)) ok = false;
    strict += ok;
    o.pass = o.pass && ok;
  }
  o.detail = "strictly smallest in " + std::to_string(strict) + "/" + std::to_string(cell.size()) + " cells;";
  for (IndexMode mode : kAllModes) {
    const auto ranked = rank_strategies(run.rows, s, mode, Metric::RetrievalClassesExamined);
    const double ratio = mean_of(ranked, StrategyKind::LeastUsed) / mean_of(ranked, StrategyKind::Designated);
    o.pass = o.pass && ratio <= 0.5;
    o.detail += " " + std::string(to_string(mode)) + " least-used/designated=" + fmt(ratio);
  }
  o.detail += " (bound 0.5)";
  return o;
}

Outcome count_strategies_largest() {
  const Scenario s = Scenario::UnequalRequests;
  const auto& run = retrieval_runs().at(s);
  if (!run.error.empty()) return {false, run.error};
  Outcome o{true, ""};
  for (IndexMode mode : kAllModes) {
    const auto ranked = rank_strategies(run.rows, s, mode, Metric::RetrievalClassesExamined);
    const std::set<StrategyKind> top{ranked[ranked.size() - 1].first, ranked[ranked.size() - 2].first};
    const bool ok = top == std::set<StrategyKind>{StrategyKind::MinCount, StrategyKind::MaxCount};
    o.pass = o.pass && ok;
    o.detail += std::string(to_string(mode)) + " order:";
    for (auto [k, v] : ranked) o.detail += " " + std::string(to_string(k)) + "=" + fmt(v, 1);
    o.detail += "; ";
  }
  return o;
}

std::map<Scenario, std::vector<BenchRow>>& addition_rows() {
  static std::map<Scenario, std::vector<BenchRow>> rows = [] {
    std::map<Scenario, std::vector<BenchRow>> out;
    for (Scenario s : kAllScenarios) out[s] = run_addition_bench(desk(s));
    return out;
  }();
  return rows;
}

Outcome global_scans_multilevel() {
  Outcome o{true, ""};
  double min_scanning = INFINITY, max_local = 0.0;
  for (Scenario s : kAllScenarios) {
    for (IndexMode mode : {IndexMode::Partial, IndexMode::Full}) {
      for (const auto& [k, v] : rank_strategies(addition_rows().at(s), s, mode, Metric::AdditionGlobalScans)) {
        if (k == StrategyKind::Designated || k == StrategyKind::LeastUsed) {
          max_local = std::max(max_local, v);
          o.pass = o.pass && v == 0.0;
        } else {
          min_scanning = std::min(min_scanning, v);
          o.pass = o.pass && v >= 1.0;
        }
      }
    }
  }
  o.detail = "designated/least-used max=" + fmt(max_local) + ", others min=" + fmt(min_scanning) + " per add";
  return o;
}

Outcome global_scans_primary() {
  Outcome o{true, ""};
  double worst = 0.0;
  for (Scenario s : kAllScenarios) {
    for (const auto& [k, v] : rank_strategies(addition_rows().at(s), s, IndexMode::Primary, Metric::AdditionGlobalScans))
      worst = std::max(worst, v);
  }
  o.pass = worst == 0.0;
  o.detail = "max mean global scans " + fmt(worst);
  return o;
}

Outcome rearrangement() {
  std::mt19937_64 rng(8);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    std::vector<double> x(n), p(n);
    for (auto& v : x) v = static_cast<double>(1 + rng() % 20);
    double sum = 0.0;
    for (auto& v : p) sum += (v = static_cast<double>(1 + rng() % 100));
    for (auto& v : p) v /= sum;
    // Brute force over every assignment of sizes to probabilities.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      double y = 0.0;
      for (std::size_t i = 0; i < n; ++i) y += p[i] * x[perm[i]];
      best = std::min(best, y);
    } while (std::next_permutation(perm.begin(), perm.end()));
    // Opposite ordering: largest sizes on smallest probabilities.
    std::vector<double> xs = x, ps = p;
    std::sort(xs.begin(), xs.end());
    std::sort(ps.begin(), ps.end(), std::greater<>());
    const double model = expected_search_cost(xs, ps);
    if (std::abs(model - best) > 1e-12 * std::max(1.0, best)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 1000 instances (n <= 6)"};
}

// Upper 1% point of chi-square via the Wilson-Hilferty approximation.
double chi2_critical_01(double df) {
  const double z = 2.3263478740408408;
  const double h = 2.0 / (9.0 * df);
  return df * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
}

Outcome distribution_fidelity() {
  Outcome o{true, ""};
  const std::size_t q = BenchConfig::desk_workload().distribution.q;
  const std::size_t draws = 1000000;
  for (double slope : {0.0, 0.5, 1.0}) {
    const DistributionSpec spec{q, slope, SkewTarget::RetrievalRequests, 0};
    const auto table = theoretical_probabilities(spec);
    RandomStream stream(RandomStream::derive(42, static_cast<std::uint64_t>(slope * 10)));
    std::vector<double> counts(q, 0.0);
    for (std::size_t i = 0; i < draws; ++i) counts[sample_parameter(spec, stream)] += 1.0;
    double chi2 = 0.0;
    std::size_t bins = 0;
    for (std::size_t i = 0; i < q; ++i) {
      const double e = table.values()[i] * static_cast<double>(draws);
      if (e <= 0.0) continue;
      chi2 += (counts[i] - e) * (counts[i] - e) / e;
      ++bins;
    }
    const double crit = chi2_critical_01(static_cast<double>(bins - 1));
    o.pass = o.pass && chi2 <= crit;
    o.detail += "l=" + fmt(slope, 1) + " chi2=" + fmt(chi2, 1) + "/" + fmt(crit, 1) + "; ";
  }
  const DistributionSpec two{2, 1.0, SkewTarget::RetrievalRequests, 0};
  RandomStream stream(RandomStream::derive(42, 99));
  double zero = 0.0;
  for (std::size_t i = 0; i < draws; ++i) zero += sample_parameter(two, stream) == 0;
  const double f0 = zero / static_cast<double>(draws);
  o.pass = o.pass && std::abs(f0 - 0.25) <= 0.005 && std::abs((1.0 - f0) - 0.75) <= 0.005;
  o.detail += "q=2 freq " + fmt(f0, 4) + "/" + fmt(1.0 - f0, 4);
  return o;
}

Outcome integrity_soak() {
  const auto pool = testing::random_services(12000, 300, 6, 4242, 1500);
  auto table = std::make_shared<ProbabilityTable>(ProbabilityTable::uniform(300));
  std::size_t violations = 0, m_errors = 0, runs = 0;
  for (IndexMode mode : kAllModes) {
    for (StrategyKind kind : kAllStrategies) {
      std::mt19937_64 rng(RandomStream::derive(7, static_cast<std::uint64_t>(mode), static_cast<std::uint64_t>(kind)));
      KeySelector sel(kind, 11, table);
      IndexModel index(mode);
      std::vector<const Service*> live;
      std::size_t next = 0;
      for (int op = 0; op < 10000; ++op) {
        if (live.empty() || rng() % 10 < 6) {
          add_service(index, pool[next], sel);
          live.push_back(&pool[next++]);
        } else {
          const std::size_t pick = rng() % live.size();
          if (!remove_service(index, live[pick]->id)) ++violations;
          live[pick] = live.back();
          live.pop_back();
        }
      }
      violations += integrity_check(index).size();
      std::set<std::vector<ParamId>> distinct;
      for (const Service* s : live) distinct.emplace(s->inputs.begin(), s->inputs.end());
      const std::size_t expected_m = mode == IndexMode::Primary ? 0 : distinct.size();
      if (index.input_similar_count() != expected_m || index.service_count() != live.size()) ++m_errors;
      ++runs;
    }
  }
  return {violations == 0 && m_errors == 0, std::to_string(runs) + " runs x 10000 ops: " + std::to_string(violations) +
                                                " integrity violations, " + std::to_string(m_errors) +
                                                " inconsistent m"};
}

std::string run_cli_csv(std::vector<std::string> args, int& code) {
  std::vector<const char*> argv{"svcbench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  std::istringstream in(out.str());
  std::string line, kept;
  while (std::getline(in, line))
    if (line.find("wall_ms") == std::string::npos) kept += line + '\n';
  return kept;
}

Outcome determinism() {
  int c1 = 0, c2 = 0;
  const std::vector<std::string> args{"bench-retrieve", "--scale", "desk", "--seed", "42", "--threads", "5"};
  const std::string a = run_cli_csv(args, c1);
  const std::string b = run_cli_csv(args, c2);
  const auto lines = std::count(a.begin(), a.end(), '\n');
  return {c1 == 0 && c2 == 0 && a == b && lines > 1,
          std::to_string(lines) + " non-wall CSV lines, " + (a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  report(1, "oracle equivalence", oracle_equivalence);
  report(2, "equal probabilities: strategies within 1.25x", [] { return balanced(Scenario::EqualProb); });
  report(3, "unequal inputs: strategies within 1.25x", [] { return balanced(Scenario::UnequalInputs); });
  report(4, "unequal requests: least-used smallest and <= half of designated", least_used_smallest);
  report(5, "unequal requests: min-count and max-count largest", count_strategies_largest);
  report(6, "partial/full: global scans only for scanning strategies", global_scans_multilevel);
  report(7, "primary: no global scans", global_scans_primary);
  report(8, "rearrangement minimum", rearrangement);
  report(9, "distribution fidelity", distribution_fidelity);
  report(10, "integrity soak", integrity_soak);
  report(11, "determinism", determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
