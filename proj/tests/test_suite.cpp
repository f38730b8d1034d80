#include <catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include <hypercone/suite.hpp>

using namespace hypercone;

namespace {

std::vector<Exemplar> pick(std::initializer_list<const char*> ids) {
  std::vector<Exemplar> out;
  for (const char* id : ids) out.push_back(find_exemplar(id));
  return out;
}

}  // namespace

TEST_CASE("suite runs clean on a representative subset") {
  SuiteConfig cfg;
  cfg.seed = 2024;
  cfg.samples = 60;
  const auto exs = pick({"ex3_3", "ex3_5", "exR4E2", "exS2"});
  const SuiteReport rep = run_suite(exs, cfg);

  CHECK(rep.failed == 0);
  CHECK(rep.passed == static_cast<int>(rep.checks.size()));
  CHECK(rep.passed >= 4 * 8);  // every exemplar contributes at least the core checks

  for (const auto& c : rep.checks) {
    INFO(c.id << " margin " << c.margin);
    CHECK(c.pass);
    CHECK(c.margin >= 0.0);
    CHECK_FALSE(c.statement.empty());
  }
}

TEST_CASE("check ids are unique, sorted, and carry derived seeds") {
  SuiteConfig cfg;
  cfg.seed = 99;
  cfg.samples = 10;
  const SuiteReport rep = run_suite(pick({"ex3_2", "ex3_3"}), cfg);

  std::set<std::string> ids;
  std::string prev;
  for (const auto& c : rep.checks) {
    CHECK(ids.insert(c.id).second);
    CHECK(prev < c.id);
    prev = c.id;
    CHECK(c.seed == (cfg.seed ^ fnv1a(c.id)));
    CHECK(c.id.find('/') != std::string::npos);
  }

  // The incomplete exemplars carry no frame checks; the Jordan ones do.
  CHECK(ids.count("ex3_3/frame-combination") == 1);
  CHECK(ids.count("ex3_2/frame-combination") == 0);
  CHECK(ids.count("ex3_2/completeness-probe") == 1);
}

TEST_CASE("suite reports are deterministic for a fixed seed") {
  SuiteConfig cfg;
  cfg.seed = 31337;
  cfg.samples = 40;
  const auto exs = pick({"ex3_4", "exS3"});

  const std::string a = suite_report_to_json(run_suite(exs, cfg)).dump(2);
  const std::string b = suite_report_to_json(run_suite(exs, cfg)).dump(2);
  CHECK(a == b);

  SuiteConfig other = cfg;
  other.seed = 31338;
  const std::string c = suite_report_to_json(run_suite(exs, other)).dump(2);
  CHECK(a != c);
}

TEST_CASE("report JSON exposes config, verdicts and counters") {
  SuiteConfig cfg;
  cfg.seed = 5;
  cfg.samples = 15;
  const SuiteReport rep = run_suite(pick({"exR3E2"}), cfg);
  const io::Json j = suite_report_to_json(rep);

  CHECK(j.at("config").at("seed") == 5);
  CHECK(j.at("config").at("samples") == 15);
  CHECK(j.at("passed") == rep.passed);
  CHECK(j.at("failed") == 0);
  REQUIRE(j.at("checks").is_array());
  REQUIRE(j.at("checks").size() == rep.checks.size());
  const auto& first = j.at("checks").front();
  CHECK(first.contains("id"));
  CHECK(first.contains("statement"));
  CHECK(first.at("verdict") == "pass");
  CHECK(first.contains("margin"));
  CHECK(first.contains("seed"));
  CHECK(first.contains("samples"));
}

TEST_CASE("full catalog passes at reduced sample count") {
  SuiteConfig cfg;
  cfg.seed = 2024;
  cfg.samples = 25;
  const SuiteReport rep = run_suite(catalog(), cfg);
  for (const auto& c : rep.checks) {
    INFO(c.id << " margin " << c.margin);
    CHECK(c.pass);
  }
  CHECK(rep.failed == 0);
}
