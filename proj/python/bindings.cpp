#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "svcindex/bench.hpp"
#include "svcindex/index.hpp"
#include "svcindex/key_selection.hpp"
#include "svcindex/repository.hpp"
#include "svcindex/workload.hpp"

namespace py = pybind11;
using namespace svcindex;

namespace {

IndexMode mode_arg(const std::string& text) {
  auto m = parse_index_mode(text);
  if (!m) throw ConfigError("unknown index mode '" + text + "'");
  return *m;
}

StrategyKind strategy_arg(const std::string& text) {
  auto k = parse_strategy(text);
  if (!k) throw ConfigError("unknown strategy '" + text + "'");
  return *k;
}

py::dict add_stats_dict(const AddStats& s) {
  py::dict d;
  d["global_scans"] = s.global_scans;
  d["local_scans"] = s.local_scans;
  d["created_key_classes"] = s.created_key_classes;
  d["created_input_similar_classes"] = s.created_input_similar_classes;
  d["created_similar_classes"] = s.created_similar_classes;
  return d;
}

// An index together with the strategy that keys its services.
class PyIndex {
 public:
  PyIndex(const std::string& mode, const std::string& strategy, std::uint64_t seed,
          std::optional<std::vector<double>> probabilities)
      : index_(mode_arg(mode)), selector_(make(strategy, seed, std::move(probabilities))) {
    selector_.require_ready();
  }

  py::dict add(ServiceId id, const std::vector<ParamId>& inputs, const std::vector<ParamId>& outputs,
               const AttributeMap& attributes) {
    return add_stats_dict(add_service(index_, make_service(id, inputs, outputs, attributes), selector_));
  }

  bool remove(ServiceId id) { return remove_service(index_, id); }

  py::tuple retrieve_ids(const std::vector<ParamId>& provided) const {
    const RetrievalResult r = retrieve(index_, ParamSet(provided));
    py::dict stats;
    stats["key_lookups"] = r.stats.key_lookups;
    stats["classes_examined"] = r.stats.classes_examined;
    stats["services_returned"] = r.stats.services_returned;
    return py::make_tuple(r.services, stats);
  }

  std::vector<ServiceId> discover_ids(const std::vector<ParamId>& provided, const std::vector<ParamId>& required,
                                      const std::map<std::string, std::set<std::string>>& constraints) const {
    return discover(index_, Request{ParamSet(provided), ParamSet(required), constraints});
  }

  std::map<ParamId, std::vector<ServiceId>> partition() const { return key_partition(index_); }

  const IndexModel& model() const { return index_; }
  std::string strategy() const { return std::string(to_string(selector_.kind())); }

 private:
  static KeySelector make(const std::string& strategy, std::uint64_t seed,
                          std::optional<std::vector<double>> probabilities) {
    std::shared_ptr<const ProbabilityTable> table;
    if (probabilities) table = std::make_shared<ProbabilityTable>(std::move(*probabilities), TableOrigin::Theoretical);
    return KeySelector(strategy_arg(strategy), seed, std::move(table));
  }

  IndexModel index_;
  KeySelector selector_;
};

py::list rows_to_list(const std::vector<BenchRow>& rows) {
  py::list out;
  for (const BenchRow& r : rows) {
    py::dict d;
    d["mode"] = std::string(to_string(r.mode));
    d["strategy"] = std::string(to_string(r.strategy));
    d["scenario"] = std::string(to_string(r.scenario));
    d["dataset"] = r.dataset;
    d["metric"] = std::string(to_string(r.metric));
    d["mean"] = r.mean;
    d["stddev"] = r.stddev;
    d["count"] = r.count;
    out.append(d);
  }
  return out;
}

BenchConfig bench_config(const std::string& scenario, std::uint64_t seed, const std::string& config) {
  BenchConfig cfg;
  std::istringstream in(config);
  apply_config(in, cfg);
  auto s = parse_scenario(scenario);
  if (!s) throw ConfigError("unknown scenario '" + scenario + "'");
  cfg.scenario = *s;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multilevel service index with pluggable key selection";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidServiceError>(m, "InvalidServiceError", base.ptr());
  py::register_exception<DuplicateServiceError>(m, "DuplicateServiceError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<PyIndex>(m, "Index")
      .def(py::init<const std::string&, const std::string&, std::uint64_t, std::optional<std::vector<double>>>(),
           py::arg("mode") = "full", py::arg("strategy") = "designated", py::arg("seed") = 0,
           py::arg("probabilities") = py::none(),
           "`probabilities[i]` is the appearing probability of parameter i; least-used needs it.")
      .def("add", &PyIndex::add, py::arg("id"), py::arg("inputs"), py::arg("outputs") = std::vector<ParamId>{},
           py::arg("attributes") = AttributeMap{}, "Add a service; returns the addition counters.")
      .def("remove", &PyIndex::remove, py::arg("id"))
      .def("retrieve", &PyIndex::retrieve_ids, py::arg("provided"),
           "Services whose inputs are all provided, plus search counters.")
      .def("discover", &PyIndex::discover_ids, py::arg("provided"), py::arg("required") = std::vector<ParamId>{},
           py::arg("constraints") = std::map<std::string, std::set<std::string>>{})
      .def("integrity_check", [](const PyIndex& self) { return integrity_check(self.model()); })
      .def("key_partition", &PyIndex::partition)
      .def("keys", [](const PyIndex& self) { return self.model().keys(); })
      .def("key_class_size", [](const PyIndex& self, ParamId k) { return self.model().key_class_size(k); })
      .def("__len__", [](const PyIndex& self) { return self.model().service_count(); })
      .def("__contains__", [](const PyIndex& self, ServiceId id) { return self.model().contains(id); })
      .def_property_readonly("mode", [](const PyIndex& self) { return std::string(to_string(self.model().mode())); })
      .def_property_readonly("strategy", &PyIndex::strategy)
      .def_property_readonly("key_count", [](const PyIndex& self) { return self.model().key_count(); })
      .def_property_readonly("input_similar_count",
                             [](const PyIndex& self) { return self.model().input_similar_count(); });

  m.def(
      "expected_search_cost",
      [](const std::vector<double>& sizes, const std::vector<double>& probs) {
        return expected_search_cost(sizes, probs);
      },
      py::arg("sizes"), py::arg("probabilities"));

  m.def(
      "theoretical_probabilities",
      [](std::size_t q, double slope) {
        const auto table = theoretical_probabilities(DistributionSpec{q, slope, SkewTarget::RetrievalRequests, 0});
        return std::vector<double>(table.values().begin(), table.values().end());
      },
      py::arg("q"), py::arg("slope"));

  m.def(
      "sample_parameters",
      [](std::size_t q, double slope, std::size_t n, std::uint64_t seed) {
        const DistributionSpec spec{q, slope, SkewTarget::RetrievalRequests, seed};
        spec.validate();
        RandomStream stream(seed);
        std::vector<ParamId> out(n);
        for (auto& id : out) id = sample_parameter(spec, stream);
        return out;
      },
      py::arg("q"), py::arg("slope"), py::arg("n"), py::arg("seed") = 0);

  m.def(
      "bench_retrieve",
      [](const std::string& scenario, std::uint64_t seed, const std::string& config) {
        const BenchConfig cfg = bench_config(scenario, seed, config);
        std::vector<BenchRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_retrieval_bench(cfg);
        }
        return rows_to_list(rows);
      },
      py::arg("scenario") = "unequal-requests", py::arg("seed") = 42, py::arg("config") = "",
      "Retrieval benchmark rows; `config` holds `key = value` lines.");

  m.def(
      "bench_add",
      [](const std::string& scenario, std::uint64_t seed, const std::string& config) {
        const BenchConfig cfg = bench_config(scenario, seed, config);
        std::vector<BenchRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_addition_bench(cfg);
        }
        return rows_to_list(rows);
      },
      py::arg("scenario") = "unequal-requests", py::arg("seed") = 42, py::arg("config") = "");
}
