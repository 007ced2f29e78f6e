#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qms::cli {

inline constexpr const char* kSchema = "qms-experiment/1";
inline constexpr const char* kArtifactVersion = "0.3.0";

enum class Command { axioms, mk_dist, diameter, defect, ergodic, torus, product, tensor_certify, covering };

const char* to_string(Command c);
Command parse_command(const std::string& name);

struct SolverSettings {
  int restarts = 4;
  int iterations = 150;
  int quotient_restarts = 3;
  int quotient_iterations = 300;
  std::size_t screening_samples = 64;
  bool require_convergence = false;  // unconverged ascents become exit code 3
};

/// Parsed experiment description. `model` and `params` are validated per command when the
/// experiment runs; every level rejects unknown fields.
struct ExperimentConfig {
  std::string schema = kSchema;
  Command command = Command::axioms;
  std::string experiment_id;
  std::uint64_t seed = 0;
  nlohmann::json model = nlohmann::json::object();
  nlohmann::json params = nlohmann::json::object();
  SolverSettings solver;
  std::string out_dir = "out";
  std::string format = "csv";
  bool oracle = false;
};

/// Throws ConfigInvalid on a missing schema or seed, an unknown command or an unknown field.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// One CSV line. `bound` is empty when the quantity has no reference value.
struct Row {
  std::string experiment_id;
  std::size_t level_s = 1;
  std::string quantity;
  double value = 0.0;
  std::optional<double> bound;
  std::string certificate;
  std::uint64_t seed = 0;
};

struct Check {
  std::string name;
  bool pass = true;
  std::vector<std::size_t> rows;  // indices into Report::rows
};

/// Serialized form of a metrics SolverReport with the quantity it belongs to.
struct SolverRecord {
  std::string name;
  double value = 0.0;
  std::string certificate;
  int iterations = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  std::vector<double> residual_history;
  std::vector<double> per_level;
  bool converged = true;
  bool infinite = false;
};

struct Report {
  std::string experiment_id;
  std::string command;
  std::uint64_t seed = 0;
  std::vector<Row> rows;
  std::vector<Check> checks;
  std::vector<SolverRecord> solver_reports;

  bool all_pass() const;
  bool all_converged() const;
};

struct ManifestEntry {
  std::string check;
  bool pass = true;
  std::vector<std::size_t> rows;
};

struct RunManifest {
  std::string config_hash;
  std::string artifact_version = kArtifactVersion;
  std::string experiment_id;
  double wall_clock_seconds = 0.0;
  std::vector<ManifestEntry> entries;
  std::vector<std::string> produced_files;
  bool all_pass = true;
  bool partial = false;  // some solver did not converge
  int exit_code = 0;
};

/// Runs the experiment without touching the file system.
Report execute(const ExperimentConfig& config);

/// Runs, writes `<out_dir>/<experiment_id>.<format>` and `<out_dir>/<experiment_id>.manifest.json` (each
/// written to a temporary file and renamed into place) and returns the manifest. The report is
/// also copied to `report_out` when given.
RunManifest run(const ExperimentConfig& config, Report* report_out = nullptr);

/// CSV columns: experiment_id, level_s, quantity, value, bound, certificate, seed. Reals are
/// printed with 12 significant digits.
std::string to_csv(const Report& report);
nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunManifest& m);

/// Writes to `path + ".tmp"` and renames it over `path`. Throws IoError.
void write_atomic(const std::string& path, const std::string& contents);

/// FNV-1a 64 of the canonical config dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::string format_real(double v);

/// Caps the OpenMP worker count at QMS_THREADS when it is set.
void apply_thread_cap();

}  // namespace qms::cli
