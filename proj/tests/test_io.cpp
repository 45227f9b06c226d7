#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "svcindex/io.hpp"
#include "test_support.hpp"

using namespace svcindex;

namespace {

bool same_service(const Service& a, const Service& b) {
  return a.id == b.id && a.inputs == b.inputs && a.outputs == b.outputs && a.attributes == b.attributes;
}

template <typename Fn>
std::size_t error_line(Fn&& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("service line format") {
  const Service s = make_service(12, {5, 3}, {9}, {{"qos", "high"}, {"cost", "2"}});
  CHECK(format_service(s) == "12;3,5;9;cost=2,qos=high");
  CHECK(same_service(parse_service("12;3,5;9;cost=2,qos=high"), s));
  const Service bare = parse_service(" 4 ; 1 ;; ");
  CHECK(bare.id == 4);
  CHECK(bare.outputs.empty());
  CHECK(bare.attributes.empty());
}

TEST_CASE("repository round trip preserves every field") {
  const auto services = testing::random_services(300, 50, 5, 17, 0, 1000);
  std::stringstream buf;
  write_repository(buf, services);
  const auto back = read_repository(buf);
  REQUIRE(back.size() == services.size());
  for (std::size_t i = 0; i < services.size(); ++i) CHECK(same_service(back[i], services[i]));
}

TEST_CASE("repository errors name the line") {
  std::istringstream in("# header\n1;2;3;\n\n2;x;3;\n");
  CHECK(error_line([&] { read_repository(in, "r.txt"); }) == 4);
  std::istringstream fields("1;2;3\n");
  CHECK(error_line([&] { read_repository(fields); }) == 1);
  std::istringstream empty_inputs("1;2;;\n2;;4;\n");
  CHECK(error_line([&] { read_repository(empty_inputs); }) == 2);
  std::istringstream dup("1;2,2;;\n");
  CHECK(error_line([&] { read_repository(dup); }) == 1);
  std::istringstream attr("1;2;;noequals\n");
  CHECK(error_line([&] { read_repository(attr); }) == 1);
  try {
    std::istringstream bad("\n\n7;1;;\n8;-1;;\n");
    read_repository(bad, "r.txt");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("r.txt:4:", 0) == 0);
  }
}

TEST_CASE("request line format and round trip") {
  Request r{ParamSet{3, 1}, ParamSet{8}, {{"provider", {"acme", "globex"}}, {"tier", {"gold"}}}};
  const std::string line = format_request(r);
  CHECK(line == "1,3|8|provider=acme;provider=globex;tier=gold");
  const Request back = parse_request(line);
  CHECK(back.provided == r.provided);
  CHECK(back.required == r.required);
  CHECK(back.constraints == r.constraints);

  const Request bare = parse_request("4,5||");
  CHECK(bare.provided == ParamSet{4, 5});
  CHECK(bare.required.empty());
  CHECK(bare.constraints.empty());

  std::vector<Request> many;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) many.push_back(Request{testing::random_request(rng, 30, 1 + rng() % 10), {}, {}});
  std::stringstream buf;
  write_requests(buf, many);
  const auto parsed = read_requests(buf);
  REQUIRE(parsed.size() == many.size());
  for (std::size_t i = 0; i < many.size(); ++i) CHECK(parsed[i].provided == many[i].provided);
}

TEST_CASE("request errors name the line") {
  std::istringstream in("1|2|\n1,2\n");
  CHECK(error_line([&] { read_requests(in); }) == 2);
  std::istringstream attr("1||=x\n");
  CHECK(error_line([&] { read_requests(attr); }) == 1);
}

TEST_CASE("file helpers round trip and report missing files") {
  const auto dir = std::filesystem::temp_directory_path() / "svcindex_test_io";
  std::filesystem::create_directories(dir);
  const auto services = testing::travel_services();
  save_repository(dir / "repo.txt", services);
  const auto back = load_repository(dir / "repo.txt");
  REQUIRE(back.size() == 3);
  CHECK(same_service(back[2], services[2]));
  std::vector<Request> reqs{Request{ParamSet{0, 1}, {}, {}}};
  save_requests(dir / "req.txt", reqs);
  CHECK(load_requests(dir / "req.txt")[0].provided == ParamSet{0, 1});
  CHECK_THROWS_AS(load_repository(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}
