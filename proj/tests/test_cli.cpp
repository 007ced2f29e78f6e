#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qms/cli.hpp"
#include "qms/errors.hpp"

using namespace qms;
using namespace qms::cli;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io_error;
}

json base(const std::string& command) {
  return json{{"schema", kSchema}, {"command", command}, {"seed", 5}};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Row* find_row(const Report& r, const std::string& quantity, std::size_t level = 1) {
  for (const Row& row : r.rows)
    if (row.quantity == quantity && row.level_s == level) return &row;
  return nullptr;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qms_cli_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config validation") {
  const ExperimentConfig c = parse_config(base("axioms"));
  CHECK(c.command == Command::axioms);
  CHECK(c.seed == 5);
  CHECK(c.experiment_id == "axioms");
  CHECK(c.format == "csv");

  json j = base("axioms");
  j.erase("seed");
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::config_invalid);
  j = base("axioms");
  j.erase("schema");
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::config_invalid);
  j = base("axioms");
  j["schema"] = "qms-experiment/0";
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::config_invalid);
  j = base("axioms");
  j["colour"] = "blue";
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::config_invalid);
  j = base("axioms");
  j["solver"] = {{"restarts", 2}, {"speed", 3}};
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::config_invalid);
  j = base("axioms");
  j["seed"] = -1;
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::config_invalid);
  j = base("axioms");
  j["output"] = {{"format", "xml"}};
  CHECK(kind_of([&] { parse_config(j); }) == ErrorKind::config_invalid);
  CHECK(kind_of([] { parse_config(base("plot")); }) == ErrorKind::config_invalid);

  j = base("axioms");
  j["seed"] = 18446744073709551615ULL;
  CHECK(parse_config(j).seed == 18446744073709551615ULL);

  // Unknown model and params fields are rejected before any computation.
  j = base("mk-dist");
  j["model"] = {{"kind", "two_point"}, {"rho", 1.0}, {"extra", 1}};
  CHECK(kind_of([&] { execute(parse_config(j)); }) == ErrorKind::config_invalid);
  j["model"] = {{"kind", "two_point"}};
  j["params"] = {{"phi", {1.0, 0.0}}, {"trials", 3}};
  CHECK(kind_of([&] { execute(parse_config(j)); }) == ErrorKind::config_invalid);
  j["params"] = {{"phi", {0.7, 0.7}}};
  CHECK(kind_of([&] { execute(parse_config(j)); }) == ErrorKind::config_invalid);
  j = base("axioms");
  j["model"] = {{"kind", "fuzzy_torus"}, {"q", 3}, {"p", 3}};
  CHECK(kind_of([&] { execute(parse_config(j)); }) == ErrorKind::config_invalid);
}

TEST_CASE("config hash depends on content only") {
  const ExperimentConfig a = parse_config(base("axioms"));
  ExperimentConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 6;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(parse_config(to_json(a))) == config_hash(a));
}

TEST_CASE("CSV formatting") {
  CHECK(format_real(1.0 / 3.0) == "0.333333333333");
  CHECK(format_real(-0.0) == "0");
  CHECK(format_real(INFINITY) == "inf");
  CHECK(format_real(1e-20) == "1e-20");

  Report empty;
  CHECK(to_csv(empty) == "experiment_id,level_s,quantity,value,bound,certificate,seed\n");

  Report r;
  r.rows.push_back({"a,b", 2, "q", 0.5, std::nullopt, "exact", 3});
  r.rows.push_back({"x", 1, "q", 2.0, 1.0, "lower_bound", 3});
  CHECK(to_csv(r) ==
        "experiment_id,level_s,quantity,value,bound,certificate,seed\n"
        "\"a,b\",2,q,0.5,,exact,3\n"
        "x,1,q,2,1,lower_bound,3\n");
}

TEST_CASE("JSON report round trip") {
  Report r;
  r.experiment_id = "rt";
  r.command = "diameter";
  r.seed = 99;
  r.rows.push_back({"rt", 1, "diameter_constant", std::sqrt(2.0), 1.0 / 3.0, "lower_bound", 99});
  r.rows.push_back({"rt", 2, "mk_distance", INFINITY, std::nullopt, "exact", 99});
  r.checks.push_back({"diameter/bound", false, {0, 1}});
  r.solver_reports.push_back({"diameter_constant", std::acos(-1.0), "lower_bound", 120, 4, 99, {0.1, 0.2 / 3.0},
                              {1.0, std::exp(1.0)}, false, false});
  const std::string first = to_json(r).dump(2);
  const Report back = report_from_json(json::parse(first));
  CHECK(to_json(back).dump(2) == first);
  CHECK(back.rows[1].value == INFINITY);
  CHECK_FALSE(back.rows[1].bound.has_value());
  CHECK(back.rows[0].value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK(back.checks[0].rows == std::vector<std::size_t>{0, 1});
  CHECK_FALSE(back.all_pass());
  CHECK_FALSE(back.all_converged());
  CHECK(to_csv(back) == to_csv(r));
}

TEST_CASE("mk-dist on the two-point space") {
  json j = base("mk-dist");
  j["model"] = {{"kind", "two_point"}, {"rho", 1.0}};
  const Report r = execute(parse_config(j));
  const Row* row = find_row(r, "mk_distance");
  REQUIRE(row != nullptr);
  CHECK(std::abs(row->value - 1.0) <= 1e-3);
  REQUIRE(row->bound.has_value());
  CHECK(*row->bound == 1.0);
  CHECK(r.all_pass());
  CHECK(r.solver_reports.size() == 2);

  j["oracle"] = true;
  const Report exact = execute(parse_config(j));
  CHECK(find_row(exact, "mk_distance")->certificate == "exact");
}

TEST_CASE("axioms on the fuzzy torus") {
  json j = base("axioms");
  j["model"] = {{"kind", "fuzzy_torus"}, {"q", 3}};
  j["params"] = {{"max_level", 2}, {"trials", 20}, {"kernel_level", 2}, {"entrywise_samples", 2}};
  const Report r = execute(parse_config(j));
  CHECK(r.all_pass());
  std::size_t residuals = 0;
  for (const Row& row : r.rows) {
    if (row.quantity.find("residual") == std::string::npos && row.quantity.find("violation") == std::string::npos)
      continue;
    ++residuals;
    CHECK(row.value <= 1e-9);
  }
  CHECK(residuals == 4 * 4 + 4 * 2 * 2);
  // Kernel dimension: the ergodic action has a one-dimensional kernel at level 1, s^2 at level s.
  CHECK(find_row(r, "action/kernel_dim", 2)->value == 4.0);
}

TEST_CASE("product on the sigma example reports the spectrum") {
  json j = base("product");
  j["model"] = {{"kind", "sigma"}};
  j["params"] = {{"max_level", 1}, {"trials", 10}, {"tensor_elements", 0}};
  const Report r = execute(parse_config(j));
  CHECK(r.all_pass());
  for (std::size_t i = 0; i < 4; ++i) {
    const Row* row = find_row(r, "eigenvalue/" + std::to_string(i));
    REQUIRE(row != nullptr);
    CHECK(std::abs(std::abs(row->value) - std::sqrt(2.0)) <= 1e-10);
  }
}

TEST_CASE("defect run has one row per level") {
  json j = base("defect");
  j["model"] = {{"kind", "fuzzy_torus"}, {"q", 2}};
  j["params"] = {{"weight", "uniform"}, {"max_level", 2}, {"trials", 4}};
  j["solver"] = {{"restarts", 2}, {"iterations", 40}};
  const Report r = execute(parse_config(j));
  std::size_t rows = 0;
  for (const Row& row : r.rows)
    if (row.quantity == "defect") {
      ++rows;
      CHECK(row.level_s == rows);
    }
  CHECK(rows == 2);
  CHECK(r.all_pass());
}

TEST_CASE("run writes data and manifest atomically and deterministically") {
  const auto dir = scratch("run");
  json j = base("covering");
  j["experiment_id"] = "cover";
  j["model"] = {{"kind", "two_point"}, {"rho", 1.0}};
  j["params"] = {{"eps", {0.25, 0.5}}, {"samples", 50}};
  j["output"] = {{"dir", dir.string()}};
  const ExperimentConfig c = parse_config(j);
  const RunManifest m = run(c);
  CHECK(m.exit_code == 0);
  CHECK(m.all_pass);
  REQUIRE(m.produced_files.size() == 2);
  CHECK(std::filesystem::exists(dir / "cover.csv"));
  CHECK(std::filesystem::exists(dir / "cover.manifest.json"));
  for (const auto& e : std::filesystem::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");

  const std::string csv = slurp((dir / "cover.csv").string());
  const json manifest = json::parse(slurp((dir / "cover.manifest.json").string()));
  CHECK(manifest.at("config_hash") == config_hash(c));
  CHECK(manifest.at("exit_code") == 0);
  CHECK(manifest.contains("wall_clock_seconds"));
  // Every CSV row belongs to a manifest entry.
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  std::set<std::size_t> traced;
  for (const auto& e : manifest.at("entries"))
    for (std::size_t r : e.at("rows").get<std::vector<std::size_t>>()) traced.insert(r);
  CHECK(traced.size() == lines - 1);

  run(c);
  CHECK(slurp((dir / "cover.csv").string()) == csv);

  ExperimentConfig jc = c;
  jc.format = "json";
  run(jc);
  const Report back = report_from_json(json::parse(slurp((dir / "cover.json").string())));
  CHECK(to_csv(back) == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("failing checks set a nonzero exit code") {
  const auto dir = scratch("fail");
  json j = base("mk-dist");
  j["model"] = {{"kind", "two_point"}, {"rho", 1.0}};
  j["params"] = {{"expected", 2.0}};
  j["output"] = {{"dir", dir.string()}};
  const RunManifest m = run(parse_config(j));
  CHECK_FALSE(m.all_pass);
  CHECK(m.exit_code == 1);

  j["params"] = json::object();
  j["output"] = {{"dir", "/proc/qms-cannot-write"}};
  CHECK(kind_of([&] { run(parse_config(j)); }) == ErrorKind::io_error);
  std::filesystem::remove_all(dir);
}
