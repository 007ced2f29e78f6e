// Acceptance suite: one PASS/FAIL line per criterion. Most criteria run the shipped experiment
// configs through the CLI runner; the Monge-Kantorovich criterion adds an independent grid oracle.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qms/cli.hpp"
#include "qms/metrics.hpp"
#include "qms/random.hpp"

#ifndef QMS_CONFIG_DIR
#define QMS_CONFIG_DIR "configs"
#endif

using namespace qms;
namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "qms_acceptance";

struct Outcome {
  cli::Report report;
  std::string csv;
};

std::map<std::string, Outcome> g_runs;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

cli::ExperimentConfig config(const std::string& name, const fs::path& out) {
  cli::ExperimentConfig c = cli::load_config((fs::path(QMS_CONFIG_DIR) / (name + ".json")).string());
  c.out_dir = out.string();
  c.format = "csv";
  return c;
}

const Outcome& outcome(const std::string& name) {
  auto it = g_runs.find(name);
  if (it != g_runs.end()) return it->second;
  const cli::ExperimentConfig c = config(name, kOut / "run1");
  Outcome o;
  cli::run(c, &o.report);
  o.csv = slurp(fs::path(c.out_dir) / (c.experiment_id + ".csv"));
  return g_runs.emplace(name, std::move(o)).first->second;
}

// Every check whose name starts with one of the prefixes must be present and pass.
bool checks_pass(const cli::Report& r, const std::vector<std::string>& prefixes, std::string& detail) {
  bool ok = true;
  for (const std::string& p : prefixes) {
    bool seen = false;
    for (const cli::Check& c : r.checks)
      if (c.name.rfind(p, 0) == 0) {
        seen = true;
        if (!c.pass) {
          ok = false;
          detail += " failed:" + c.name;
        }
      }
    if (!seen) {
      ok = false;
      detail += " missing:" + p;
    }
  }
  return ok;
}

double row_value(const cli::Report& r, const std::string& quantity, std::size_t level = 1) {
  for (const cli::Row& row : r.rows)
    if (row.quantity == quantity && row.level_s == level) return row.value;
  return NAN;
}

double max_row(const cli::Report& r, const std::string& fragment) {
  double m = 0.0;
  for (const cli::Row& row : r.rows)
    if (row.quantity.find(fragment) != std::string::npos) m = std::max(m, row.value);
  return m;
}

std::string fmt(double v) { return cli::format_real(v); }

// Kantorovich dual on three points: max over real f with f(0) = 0 and |f(p) - f(q)| <= rho(p, q)
// of |sum_p (phi_p - psi_p) f(p)|, by a grid over (f(1), f(2)).
double three_point_oracle(const std::vector<std::vector<double>>& rho, const std::vector<double>& phi,
                          const std::vector<double>& psi) {
  const int n = 2000;
  double best = 0.0;
  for (int a = -n; a <= n; ++a) {
    const double f1 = rho[0][1] * a / n;
    for (int b = -n; b <= n; ++b) {
      const double f2 = rho[0][2] * b / n;
      if (std::abs(f1 - f2) > rho[1][2]) continue;
      best = std::max(best, std::abs((phi[1] - psi[1]) * f1 + (phi[2] - psi[2]) * f2));
    }
  }
  return best;
}

UcpMap probability_state(const std::vector<double>& w) {
  UcpMap s{1, {}};
  for (double x : w) s.values.push_back(ComplexMatrix{{x}});
  return s;
}

struct Criterion {
  int number;
  std::string title;
  std::function<bool(std::string&)> body;
};

}  // namespace

int main() {
  fs::remove_all(kOut);
  cli::apply_thread_cap();

  const std::vector<Criterion> criteria{
      {1, "operator seminorm axioms and entrywise bounds",
       [](std::string& d) {
         const cli::Report& r = outcome("axioms_fuzzy_torus").report;
         bool ok = checks_pass(r, {"commutator/axioms", "action/axioms", "stabilized/axioms", "max/axioms",
                                   "commutator/entrywise", "action/entrywise", "stabilized/entrywise",
                                   "max/entrywise"},
                               d);
         for (const char* fam : {"commutator", "action", "stabilized", "max"})
           ok = ok && row_value(r, std::string(fam) + "/cases", 4) >= 200;
         d += " max_residual=" + fmt(std::max(max_row(r, "residual"), max_row(r, "violation")));
         return ok;
       }},
      {2, "kernel dimension scales as s^2",
       [](std::string& d) {
         const cli::Report& r = outcome("axioms_fuzzy_torus").report;
         const bool ok = checks_pass(r, {"commutator/kernel", "action/kernel"}, d);
         d += " commutator=" + fmt(row_value(r, "commutator/kernel_dim", 1)) + "," +
              fmt(row_value(r, "commutator/kernel_dim", 2)) + "," + fmt(row_value(r, "commutator/kernel_dim", 3));
         d += " action=" + fmt(row_value(r, "action/kernel_dim", 1)) + "," +
              fmt(row_value(r, "action/kernel_dim", 2)) + "," + fmt(row_value(r, "action/kernel_dim", 3));
         return ok;
       }},
      {3, "external product inequality in all parity cases",
       [](std::string& d) {
         const cli::Report& r = outcome("product_random").report;
         const cli::Report& s = outcome("product_sigma").report;
         bool ok = checks_pass(r, {"product/even-even", "product/even-odd", "product/odd-even", "product/odd-odd"}, d);
         ok = checks_pass(s, {"product/sigma_spectrum"}, d) && ok;
         d += " max_violation=" + fmt(max_row(r, "max_violation")) +
              " recovery=" + fmt(max_row(r, "recovery_residual")) + " grading=" + fmt(max_row(r, "grading_residual"));
         return ok;
       }},
      {4, "sampled tensor seminorm against the exact value",
       [](std::string& d) {
         const cli::Report& r = outcome("product_random").report;
         const bool ok = checks_pass(r, {"tensor/upper", "tensor/reach"}, d);
         d += " min_ratio=" + fmt(row_value(r, "tensor_min_ratio"));
         return ok;
       }},
      {5, "Monge-Kantorovich distance",
       [](std::string& d) {
         const cli::Report& two = outcome("mk_two_point").report;
         const cli::Report& three = outcome("mk_three_point").report;
         bool ok = checks_pass(two, {"mk/expected", "mk/symmetry"}, d) && checks_pass(three, {"mk/symmetry"}, d);

         const std::vector<std::vector<double>> rho{{0, 1.0, 1.7}, {1.0, 0, 0.9}, {1.7, 0.9, 0}};
         const double oracle = three_point_oracle(rho, {0.2, 0.5, 0.3}, {0.6, 0, 0.4});
         const double value = row_value(three, "mk_distance");
         ok = ok && std::abs(value - oracle) <= 1e-3;
         d += " two_point=" + fmt(row_value(two, "mk_distance")) + " three_point=" + fmt(value) +
              " oracle=" + fmt(oracle);

         // Symmetry and triangle inequality on random state triples.
         const SeminormFamily f = SeminormFamily::finite_metric(rho);
         MkOptions o;
         o.solver.ratio.restarts = 4;
         o.solver.ratio.iterations = 150;
         double sym = 0.0, tri = 0.0;
         for (std::uint64_t t = 0; t < 10; ++t) {
           Rng rng(derive_seed(0xacce55, t));
           std::vector<UcpMap> s;
           for (int k = 0; k < 3; ++k) {
             std::vector<double> w{rng.uniform(), rng.uniform(), rng.uniform()};
             const double total = w[0] + w[1] + w[2];
             for (double& x : w) x /= total;
             s.push_back(probability_state(w));
           }
           const double ab = mk_distance(f, s[0], s[1], o).value, ba = mk_distance(f, s[1], s[0], o).value;
           const double bc = mk_distance(f, s[1], s[2], o).value, ac = mk_distance(f, s[0], s[2], o).value;
           sym = std::max(sym, std::abs(ab - ba));
           tri = std::max({tri, ac - ab - bc, ab - ac - bc, bc - ab - ac});
         }
         ok = ok && sym <= 1e-6 && tri <= 1e-6;
         d += " symmetry=" + fmt(sym) + " triangle=" + fmt(std::max(tri, 0.0));
         return ok;
       }},
      {6, "ergodic Weyl action model",
       [](std::string& d) {
         bool ok = true;
         for (const char* name : {"ergodic_q3", "ergodic_q5"}) {
           const cli::Report& r = outcome(name).report;
           ok = checks_pass(r, {"ergodic/model", "ergodic/projections", "ergodic/defect_table", "ergodic/diameter",
                                "ergodic/fejer_defect", "ergodic/fejer_monotone"},
                            d) &&
                ok;
           for (const cli::Row& row : r.rows)
             if (row.quantity.rfind("table_cases/", 0) == 0) ok = ok && row.value >= 500;
           d += std::string(" ") + name + ":table_ratio=" + fmt(max_row(r, "table_max_ratio")) +
                ",diameter=" + fmt(max_row(r, "diameter_constant"));
         }
         return ok;
       }},
      {7, "noncommutative torus action and Dirac bounds",
       [](std::string& d) {
         bool ok = true;
         for (const char* name : {"torus_q3", "torus_q5"}) {
           const cli::Report& r = outcome(name).report;
           ok = checks_pass(r, {"torus/relation", "torus/action_bound", "torus/components", "torus/refinement"}, d) &&
                ok;
           d += std::string(" ") + name + ":max_ratio=" + fmt(max_row(r, "action_max_ratio"));
         }
         return ok;
       }},
      {8, "tensor product certification",
       [](std::string& d) {
         const cli::Report& r = outcome("tensor_certify").report;
         const bool ok = checks_pass(r, {"tensor/hypothesis", "tensor/defect", "tensor/diameter"}, d);
         for (const cli::Row& row : r.rows)
           if (row.quantity == "tensor_defect" || row.quantity == "tensor_diameter")
             d += " " + row.quantity + "=" + fmt(row.value) + "<=" + fmt(row.bound.value_or(NAN));
         return ok;
       }},
      {9, "deterministic CSV output",
       [](std::string& d) {
         bool ok = !g_runs.empty();
         for (const auto& [name, first] : g_runs) {
           const cli::ExperimentConfig c = config(name, kOut / "run2");
           cli::run(c);
           const std::string again = slurp(fs::path(c.out_dir) / (c.experiment_id + ".csv"));
           if (again != first.csv || cli::to_csv(first.report) != first.csv) {
             ok = false;
             d += " differs:" + name;
           }
         }
         d += " runs=" + std::to_string(g_runs.size());
         return ok;
       }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    bool pass = false;
    try {
      pass = c.body(detail);
    } catch (const std::exception& e) {
      detail += std::string(" error: ") + e.what();
    }
    failures += pass ? 0 : 1;
    std::printf("%s criterion %d: %s |%s\n", pass ? "PASS" : "FAIL", c.number, c.title.c_str(), detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
