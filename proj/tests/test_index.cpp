#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "svcindex/index.hpp"
#include "svcindex/key_selection.hpp"
#include "svcindex/repository.hpp"
#include "test_support.hpp"

using namespace svcindex;
using namespace svcindex::testing;

namespace {

std::vector<KeySelector> all_selectors(std::uint64_t seed, std::size_t q) {
  auto table = std::make_shared<ProbabilityTable>(ProbabilityTable::uniform(q));
  std::vector<KeySelector> out;
  for (StrategyKind k : kAllStrategies) out.emplace_back(k, seed, table);
  return out;
}

bool reaches(const IndexModel& index, ParamId key, ServiceId sid) {
  const KeyClass* kc = index.find_key_class(key);
  if (!kc) return false;
  const auto leaves = index.leaf_services(*kc);
  return std::find(leaves.begin(), leaves.end(), sid) != leaves.end();
}

}  // namespace

TEST_CASE("build with fixed keys date, date, hotel address gives two key classes") {
  for (IndexMode mode : {IndexMode::Primary, IndexMode::Partial, IndexMode::Full}) {
    const IndexModel index = index_with_keys(mode, travel_services(), {kDate, kDate, kHotelAddress});
    CHECK(index.key_count() == 2);
    CHECK(index.keys() == std::vector<ParamId>{kDate, kHotelAddress});
    const KeyClass* date = index.find_key_class(kDate);
    REQUIRE(date != nullptr);
    CHECK(index.leaf_services(*date) == std::vector<ServiceId>{1, 2});
    CHECK(index.find_key_class(kCity) == nullptr);
    CHECK(integrity_check(index).empty());
  }
}

TEST_CASE("level structure per deployment mode") {
  const auto services = travel_services();
  const IndexModel primary = index_with_keys(IndexMode::Primary, services, {kDate, kDate, kHotelAddress});
  CHECK(primary.input_similar_count() == 0);
  CHECK(primary.key_class_size(kDate) == 2);  // services

  const IndexModel partial = index_with_keys(IndexMode::Partial, services, {kDate, kDate, kHotelAddress});
  CHECK(partial.input_similar_count() == 3);
  CHECK(partial.similar_count() == 0);
  CHECK(partial.key_class_size(kDate) == 2);  // input-similar classes

  const IndexModel full = index_with_keys(IndexMode::Full, services, {kDate, kDate, kHotelAddress});
  CHECK(full.input_similar_count() == 3);
  CHECK(full.similar_count() == 3);
}

TEST_CASE("services with equal inputs share an input-similar class; equal outputs share a similar class") {
  std::vector<Service> services{
      make_service(1, {1, 2}, {9}),
      make_service(2, {1, 2}, {9}),
      make_service(3, {1, 2}, {8}),
      make_service(4, {1, 3}, {9}),
  };
  const IndexModel full = index_with_keys(IndexMode::Full, services, {1, 1, 1, 1});
  CHECK(full.key_count() == 1);
  CHECK(full.input_similar_count() == 2);
  CHECK(full.similar_count() == 3);
  const SimilarClass* sc = full.similar(*full.placement(1)->similar);
  REQUIRE(sc != nullptr);
  CHECK(sc->members == std::vector<ServiceId>{1, 2});
  CHECK(integrity_check(full).empty());
}

TEST_CASE("empty service list builds an empty index") {
  for (IndexMode mode : {IndexMode::Primary, IndexMode::Partial, IndexMode::Full}) {
    KeySelector sel(StrategyKind::Designated);
    const IndexModel index = build_index(std::vector<Service>{}, mode, sel);
    CHECK(index.key_count() == 0);
    CHECK(index.input_similar_count() == 0);
    CHECK(integrity_check(index).empty());
  }
}

TEST_CASE("build_index rejects bad input before touching anything") {
  KeySelector sel(StrategyKind::Designated);
  std::vector<Service> dup{make_service(1, {1}, {}), make_service(1, {2}, {})};
  try {
    (void)build_index(dup, IndexMode::Full, sel);
    FAIL("expected DuplicateServiceError");
  } catch (const DuplicateServiceError& e) {
    CHECK(e.id() == 1);
  }

  Service empty;
  empty.id = 5;
  CHECK_THROWS_AS(build_index(std::vector<Service>{empty}, IndexMode::Full, sel), InvalidServiceError);

  KeySelector least(StrategyKind::LeastUsed);
  CHECK_THROWS_AS(build_index(travel_services(), IndexMode::Full, least), ConfigError);
}

TEST_CASE("50 random services in every mode and strategy pass integrity") {
  const auto services = random_services(50, 20, 4, 11, 15);
  for (IndexMode mode : {IndexMode::Primary, IndexMode::Partial, IndexMode::Full}) {
    for (auto& sel : all_selectors(5, 20)) {
      const IndexModel index = build_index(services, mode, sel);
      CAPTURE(to_string(mode));
      CAPTURE(to_string(sel.kind()));
      CHECK(integrity_check(index).empty());
      CHECK(index.service_count() == 50);
    }
  }
}

TEST_CASE("an added service is reachable from its chosen key") {
  const auto services = random_services(80, 30, 5, 12, 30);
  for (IndexMode mode : {IndexMode::Primary, IndexMode::Partial, IndexMode::Full}) {
    for (auto& sel : all_selectors(9, 30)) {
      IndexModel index(mode);
      for (const Service& s : services) {
        add_service(index, s, sel);
        const ParamId key = index.placement(s.id)->key;
        CHECK(s.inputs.contains(key));
        CHECK(reaches(index, key, s.id));
      }
    }
  }
}

TEST_CASE("find_input_similar_in_key_class") {
  std::vector<Service> services{make_service(1, {1, 2}, {}), make_service(2, {1, 3}, {})};
  const IndexModel index = index_with_keys(IndexMode::Partial, services, {1, 1});
  const KeyClass& kc = *index.find_key_class(1);

  std::size_t examined = 0;
  const InputSimilarClass* hit = find_input_similar_in_key_class(index, kc, ParamSet{1, 2}, &examined);
  REQUIRE(hit != nullptr);
  CHECK(hit->inputs == ParamSet{1, 2});
  CHECK(examined >= 1);
  CHECK(find_input_similar_in_key_class(index, kc, ParamSet{1, 2, 3}) == nullptr);

  const IndexModel primary = index_with_keys(IndexMode::Primary, services, {1, 1});
  CHECK_THROWS_AS(find_input_similar_in_key_class(primary, *primary.find_key_class(1), ParamSet{1, 2}),
                  ModeError);
}

TEST_CASE("every input-similar class is found again through its own key class") {
  const auto services = random_services(300, 25, 3, 21, 60);
  for (IndexMode mode : {IndexMode::Partial, IndexMode::Full}) {
    KeySelector sel(StrategyKind::Random, 4);
    const IndexModel index = build_index(services, mode, sel);
    REQUIRE(index.input_similar_count() > 0);
    for (const InputSimilarClass& isc : index.input_similar_classes()) {
      const KeyClass* kc = index.find_key_class(isc.key);
      REQUIRE(kc != nullptr);
      CHECK(find_input_similar_in_key_class(index, *kc, isc.inputs) == &isc);
    }
  }
}

TEST_CASE("integrity_check reports a service filed under a foreign key") {
  std::vector<Service> services{
      make_service(1, {1, 2}, {}),
      make_service(2, {1, 3}, {}),
      make_service(3, {4, 5}, {}),
      make_service(4, {4, 6}, {}),
  };
  IndexModel index = index_with_keys(IndexMode::Primary, services, {1, 1, 4, 4});
  REQUIRE(integrity_check(index).empty());
  IndexModelTestAccess::move_service(index, 2, 4);
  const auto violations = integrity_check(index);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("service 2") != std::string::npos);
}

TEST_CASE("erase garbage-collects emptied classes at every level") {
  std::vector<Service> services{make_service(1, {1, 2}, {7}), make_service(2, {1, 2}, {8}),
                                make_service(3, {3}, {7})};
  IndexModel index = index_with_keys(IndexMode::Full, services, {1, 1, 3});
  CHECK(index.similar_count() == 3);
  CHECK(index.erase(2));
  CHECK(index.similar_count() == 2);
  CHECK(index.input_similar_count() == 2);
  CHECK(index.erase(1));
  CHECK(index.find_key_class(1) == nullptr);
  CHECK(index.input_similar_count() == 1);
  CHECK_FALSE(index.erase(1));
  CHECK(integrity_check(index).empty());
}

TEST_CASE("1000 interleaved add/remove operations keep the index sound") {
  std::mt19937_64 rng(77);
  const auto pool = random_services(1000, 30, 4, 78, 80);
  for (IndexMode mode : {IndexMode::Primary, IndexMode::Partial, IndexMode::Full}) {
    for (auto& sel : all_selectors(13, 30)) {
      IndexModel index(mode);
      std::vector<ServiceId> live;
      std::size_t next = 0;
      for (int op = 0; op < 1000; ++op) {
        const bool add = live.empty() || (next < pool.size() && rng() % 3 != 0);
        if (add) {
          add_service(index, pool[next], sel);
          live.push_back(pool[next].id);
          ++next;
        } else {
          const std::size_t pick = rng() % live.size();
          CHECK(remove_service(index, live[pick]));
          live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
        }
      }
      CHECK(integrity_check(index).empty());
      CHECK(index.input_similar_count() == index.input_similar_classes().size());
      CHECK(index.service_count() == live.size());
    }
  }
}

TEST_CASE("mode collapse: full and partial file services identically") {
  // Shared shapes make the exact-inputs reuse path fire.
  const auto services = random_services(250, 30, 4, 31, 70);
  auto table = std::make_shared<ProbabilityTable>(ProbabilityTable::uniform(30));
  for (StrategyKind kind : kAllStrategies) {
    KeySelector a(kind, 8, table), b(kind, 8, table);
    const auto full = key_partition(build_index(services, IndexMode::Full, a));
    const auto partial = key_partition(build_index(services, IndexMode::Partial, b));
    CAPTURE(to_string(kind));
    CHECK(full == partial);
  }
}

TEST_CASE("mode collapse: primary matches full when no two services share inputs") {
  std::vector<Service> services;
  std::set<std::vector<ParamId>> seen;
  for (auto& s : random_services(250, 40, 5, 32))
    if (seen.emplace(s.inputs.begin(), s.inputs.end()).second) services.push_back(std::move(s));
  REQUIRE(services.size() > 150);
  auto table = std::make_shared<ProbabilityTable>(ProbabilityTable::uniform(40));
  for (StrategyKind kind : kAllStrategies) {
    KeySelector a(kind, 8, table), b(kind, 8, table);
    const auto full = key_partition(build_index(services, IndexMode::Full, a));
    const auto primary = key_partition(build_index(services, IndexMode::Primary, b));
    CAPTURE(to_string(kind));
    CHECK(full == primary);
  }
}

TEST_CASE("deterministic strategies co-locate services with equal inputs") {
  const auto services = random_services(300, 20, 3, 41, 25);
  std::vector<double> probs(20);
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = static_cast<double>(i + 1) / 210.0;
  auto table = std::make_shared<ProbabilityTable>(probs, TableOrigin::Theoretical);
  for (StrategyKind kind : {StrategyKind::Designated, StrategyKind::LeastUsed}) {
    for (IndexMode mode : {IndexMode::Partial, IndexMode::Full}) {
      KeySelector sel(kind, 0, table);
      const IndexModel index = build_index(services, mode, sel);
      std::map<std::uint64_t, ClassId> home;
      for (const Service& s : services) {
        const ClassId isc = *index.placement(s.id)->input_similar;
        auto [it, fresh] = home.emplace(s.inputs.fingerprint(), isc);
        CHECK(it->second == isc);
      }
      CHECK(integrity_warnings(index).empty());
    }
  }
}

TEST_CASE("integrity_warnings flags equal inputs filed under different keys") {
  std::vector<Service> services{make_service(1, {1, 2}, {}), make_service(2, {1, 2}, {})};
  IndexModel index(IndexMode::Partial);
  AddStats stats;
  index.insert(services[0], 1, stats);
  index.insert(services[1], 2, stats);
  CHECK(integrity_check(index).empty());
  CHECK(integrity_warnings(index).size() == 1);
}

TEST_CASE("insert refuses a key outside the inputs and duplicate ids") {
  IndexModel index(IndexMode::Full);
  AddStats stats;
  index.insert(make_service(1, {1, 2}, {}), 1, stats);
  CHECK(stats.created_key_classes == 1);
  CHECK(stats.created_input_similar_classes == 1);
  CHECK(stats.created_similar_classes == 1);
  CHECK_THROWS_AS(index.insert(make_service(2, {1, 2}, {}), 3, stats), InvalidServiceError);
  CHECK_THROWS_AS(index.insert(make_service(1, {1, 2}, {}), 1, stats), DuplicateServiceError);
  CHECK(integrity_check(index).empty());
}
