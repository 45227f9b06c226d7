#include "svcindex/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "svcindex/bench.hpp"
#include "svcindex/io.hpp"

namespace svcindex {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string scale;
  std::optional<std::string> scenario;
  std::string data;
  std::optional<double> oracle_fraction;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool bench) {
  cmd->add_option("--config", opt.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--scale", opt.scale, "workload preset")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--scenario", opt.scenario, "equal-prob, unequal-inputs, unequal-requests or all")
      ->check(CLI::IsMember({"all", "equal-prob", "unequal-inputs", "unequal-requests"}));
  if (bench) {
    cmd->add_option("--out", opt.out, "CSV output path (default: stdout)");
    cmd->add_option("--data", opt.data, "read datasets written by `generate` instead of generating")
        ->check(CLI::ExistingDirectory);
    cmd->add_option("--oracle-fraction", opt.oracle_fraction, "fraction of requests checked against brute force")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--threads", opt.threads, "datasets benchmarked concurrently")->check(CLI::PositiveNumber);
  } else {
    cmd->add_option("--out", opt.out, "output directory")->required();
  }
}

struct Resolved {
  BenchConfig cfg;
  std::vector<Scenario> scenarios;
};

// Precedence: defaults < config file < --scale < remaining flags.
Resolved resolve(const CommonOptions& opt) {
  Resolved r;
  BenchConfig& cfg = r.cfg;
  std::set<std::string> from_file;
  if (!opt.config.empty()) from_file = apply_config_file(opt.config, cfg);
  if (!opt.scale.empty()) {
    const double slope = cfg.workload.distribution.slope;
    cfg.workload = opt.scale == "paper" ? WorkloadConfig::paper_scale() : WorkloadConfig::desk_scale();
    cfg.workload.distribution.slope = slope;
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.oracle_fraction) cfg.oracle_fraction = *opt.oracle_fraction;
  if (opt.threads) cfg.threads = *opt.threads;

  if (opt.scenario) {
    if (*opt.scenario == "all") {
      r.scenarios.assign(std::begin(kAllScenarios), std::end(kAllScenarios));
    } else {
      r.scenarios = {*parse_scenario(*opt.scenario)};
    }
  } else if (from_file.contains("scenario")) {
    r.scenarios = {cfg.scenario};
  } else {
    r.scenarios.assign(std::begin(kAllScenarios), std::end(kAllScenarios));
  }
  return r;
}

fs::path scenario_dir(const fs::path& root, Scenario s) { return root / std::string(to_string(s)); }
fs::path repo_file(const fs::path& dir, std::size_t d) { return dir / ("repo_" + std::to_string(d) + ".txt"); }
fs::path request_file(const fs::path& dir, std::size_t d) { return dir / ("requests_" + std::to_string(d) + ".txt"); }

std::vector<Dataset> load_datasets(const fs::path& root, const BenchConfig& cfg) {
  const fs::path dir = scenario_dir(root, cfg.scenario);
  std::vector<Dataset> out;
  for (std::size_t d = 0; d < cfg.workload.n_datasets; ++d) {
    Dataset data;
    data.repository = load_repository(repo_file(dir, d));
    for (Request& r : load_requests(request_file(dir, d))) data.requests.push_back(std::move(r.provided));
    out.push_back(std::move(data));
  }
  return out;
}

int run_generate(const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  const auto [base, scenarios] = resolve(opt);
  const fs::path root = opt.out;
  fs::create_directories(root);
  {
    std::ofstream cfg_out(root / "config.txt");
    write_config(cfg_out, base);
  }
  for (Scenario s : scenarios) {
    BenchConfig cfg = base;
    cfg.scenario = s;
    cfg.validate();
    if (auto w = cfg.workload.distribution.warning()) err << "warning: " << *w << '\n';
    const fs::path dir = scenario_dir(root, s);
    fs::create_directories(dir);
    for (std::size_t d = 0; d < cfg.workload.n_datasets; ++d) {
      const Dataset data = make_dataset(cfg, d);
      save_repository(repo_file(dir, d), data.repository);
      std::vector<Request> requests;
      requests.reserve(data.requests.size());
      for (const ParamSet& p : data.requests) requests.push_back(Request{p, {}, {}});
      save_requests(request_file(dir, d), requests);
    }
    out << "wrote " << cfg.workload.n_datasets << " datasets to " << dir.string() << '\n';
  }
  return 0;
}

int run_bench(const CommonOptions& opt, bool retrieval, std::ostream& out, std::ostream& err) {
  const auto [base, scenarios] = resolve(opt);
  std::vector<BenchRow> rows;
  for (Scenario s : scenarios) {
    BenchConfig cfg = base;
    cfg.scenario = s;
    cfg.validate();
    if (auto w = cfg.workload.distribution.warning()) err << "warning: " << *w << '\n';
    const std::vector<Dataset> datasets = opt.data.empty() ? make_datasets(cfg) : load_datasets(opt.data, cfg);
    auto part = retrieval ? run_retrieval_bench(cfg, datasets) : run_addition_bench(cfg, datasets);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  sort_rows(rows);
  const std::string path = !opt.out.empty() ? opt.out : base.output;
  if (path.empty() || path == "-") {
    write_csv(rows, out);
  } else {
    write_csv(rows, fs::path(path));
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilevel service index benchmark", "svcbench"};
  app.require_subcommand(1);

  CommonOptions gen_opt, retr_opt, add_opt;
  auto* generate = app.add_subcommand("generate", "write repository and request files");
  add_common(generate, gen_opt, false);
  auto* bench_retrieve = app.add_subcommand("bench-retrieve", "retrieval benchmark, CSV output");
  add_common(bench_retrieve, retr_opt, true);
  auto* bench_add = app.add_subcommand("bench-add", "addition benchmark, CSV output");
  add_common(bench_add, add_opt, true);

  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "rank strategies from a benchmark CSV");
  report->add_option("csv", report_in, "benchmark CSV")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  try {
    if (*generate) return run_generate(gen_opt, out, err);
    if (*bench_retrieve) return run_bench(retr_opt, true, out, err);
    if (*bench_add) return run_bench(add_opt, false, out, err);
    if (*report) {
      const std::string table = format_report(read_csv(fs::path(report_in)));
      if (report_out.empty()) {
        out << table;
      } else {
        std::ofstream f(report_out);
        if (!f) throw Error("cannot open " + report_out + " for writing");
        f << table;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace svcindex
