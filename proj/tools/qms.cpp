// Command-line front end: qms <command> --config <path> [--seed N] [--out DIR] [--format csv|json] [--oracle]
//
// Exit codes: 0 every check passed, 1 some check failed, 2 invalid configuration,
// 3 a solver did not converge (with solver.require_convergence), 4 any other error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qms/cli.hpp"
#include "qms/errors.hpp"

namespace {

constexpr const char* kCommands[][2] = {
    {"axioms", "operator seminorm axioms, entrywise bounds and kernel dimensions"},
    {"mk-dist", "Monge-Kantorovich distance between two states"},
    {"diameter", "finite-diameter constant per matrix level"},
    {"defect", "approximation defect of an averaging map per matrix level"},
    {"ergodic", "ergodic Weyl action suite"},
    {"torus", "noncommutative torus action and Dirac bounds"},
    {"product", "external product inequality in every parity case"},
    {"tensor-certify", "tensor product defect and diameter certification"},
    {"covering", "covering numbers of the seminorm unit ball"},
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) qms::fail(qms::ErrorKind::config_invalid, "cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    qms::fail(qms::ErrorKind::config_invalid, "config " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on finite-dimensional quantum metric spaces"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format;
  std::uint64_t seed = 0;
  bool oracle = false;
  std::vector<CLI::Option*> seed_options, out_options, format_options;
  for (const auto& [name, description] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "experiment JSON")->required();
    seed_options.push_back(sub->add_option("--seed", seed, "override the config seed"));
    out_options.push_back(sub->add_option("--out", out_dir, "output directory"));
    format_options.push_back(sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"})));
    sub->add_flag("--oracle", oracle, "enable brute-force validation paths");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto given = [](const std::vector<CLI::Option*>& opts) {
    for (const CLI::Option* o : opts)
      if (o->count() > 0) return true;
    return false;
  };

  try {
    qms::cli::apply_thread_cap();
    const std::string command = app.get_subcommands().front()->get_name();
    nlohmann::json j = read_json(config_path);
    if (!j.is_object()) qms::fail(qms::ErrorKind::config_invalid, "config must be a JSON object");
    if (!j.contains("command")) j["command"] = command;
    if (j["command"] != command)
      qms::fail(qms::ErrorKind::config_invalid, "config is for " + j["command"].dump() + ", not \"" + command + "\"");
    if (given(seed_options)) j["seed"] = seed;
    if (given(out_options)) j["output"]["dir"] = out_dir;
    if (given(format_options)) j["output"]["format"] = format;
    if (oracle) j["oracle"] = true;

    const qms::cli::ExperimentConfig config = qms::cli::parse_config(j);
    const qms::cli::RunManifest m = qms::cli::run(config);
    for (const auto& e : m.entries) std::printf("%s %s\n", e.pass ? "PASS" : "FAIL", e.check.c_str());
    if (m.partial) std::printf("note: some solver runs stopped at the iteration limit\n");
    for (const auto& f : m.produced_files) std::printf("wrote %s\n", f.c_str());
    return m.exit_code;
  } catch (const qms::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == qms::ErrorKind::config_invalid ? 2 : 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
