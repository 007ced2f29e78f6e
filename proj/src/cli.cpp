#include "qms/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "qms/errors.hpp"
#include "qms/linalg.hpp"
#include "qms/metrics.hpp"
#include "qms/models.hpp"
#include "qms/random.hpp"
#include "qms/seminorms.hpp"
#include "qms/triples.hpp"

namespace qms::cli {

using nlohmann::json;

namespace {

constexpr Command kCommands[] = {Command::axioms,  Command::mk_dist, Command::diameter,
                                 Command::defect,  Command::ergodic, Command::torus,
                                 Command::product, Command::tensor_certify, Command::covering};

[[noreturn]] void invalid(const std::string& what) { fail(ErrorKind::config_invalid, what); }

// Typed access to one JSON object; finish() rejects every key that was never asked for.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) invalid(where_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(key);
  }

  template <class T>
  T need(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) invalid("missing field " + where_ + "." + key);
    return convert<T>(key);
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t lo, std::size_t hi) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) invalid(where_ + "." + key + " must be an integer");
    const long long x = v.get<long long>();
    if (x < static_cast<long long>(lo) || x > static_cast<long long>(hi))
      invalid(where_ + "." + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<std::size_t>(x);
  }

  double real(const std::string& key, double fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) invalid(where_ + "." + key + " must be a number");
    return v.get<double>();
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) invalid("missing field " + where_ + "." + key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!used_.count(item.key())) invalid("unknown field " + where_ + "." + item.key());
  }

 private:
  template <class T>
  T convert(const std::string& key) const {
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      invalid("field " + where_ + "." + key + " has the wrong type");
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  invalid("seed must be a nonnegative 64-bit integer");
}

// ---------------------------------------------------------------------------------------------
// Report assembly

class Builder {
 public:
  explicit Builder(const ExperimentConfig& c) {
    report_.experiment_id = c.experiment_id;
    report_.command = to_string(c.command);
    report_.seed = c.seed;
  }

  std::size_t row(std::size_t level, const std::string& quantity, double value, std::optional<double> bound,
                  const std::string& certificate) {
    report_.rows.push_back({report_.experiment_id, level, quantity, value, bound, certificate, report_.seed});
    return report_.rows.size() - 1;
  }

  void check(const std::string& name, bool pass, std::vector<std::size_t> rows) {
    report_.checks.push_back({name, pass, std::move(rows)});
  }

  void solver(const std::string& name, const SolverReport& r) {
    report_.solver_reports.push_back({name, r.value, to_string(r.certificate), r.iterations, r.restarts, r.seed,
                                      r.residual_history, r.per_level, r.converged, r.infinite});
  }

  Report take() { return std::move(report_); }

 private:
  Report report_;
};

MetricsOptions metrics_options(const ExperimentConfig& c) {
  MetricsOptions o;
  o.ratio.restarts = c.solver.restarts;
  o.ratio.iterations = c.solver.iterations;
  o.quotient.restarts = c.solver.quotient_restarts;
  o.quotient.iterations = c.solver.quotient_iterations;
  o.screening_samples = c.solver.screening_samples;
  return o;
}

std::string indexed(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

// ---------------------------------------------------------------------------------------------
// Model descriptors

struct ModelDesc {
  std::string kind;
  std::size_t q = 3;
  std::size_t p = 1;
  std::vector<std::vector<double>> distances;
  double rho = 1.0;
};

ModelDesc parse_model(const json& j, const std::vector<std::string>& kinds) {
  Fields f(j, "model");
  ModelDesc m;
  m.kind = f.need<std::string>("kind");
  if (std::find(kinds.begin(), kinds.end(), m.kind) == kinds.end()) invalid("model.kind '" + m.kind + "' not supported here");
  if (m.kind == "fuzzy_torus") {
    m.q = f.count("q", 3, 2, 16);
    m.p = f.count("p", 1, 1, 15);
    if (m.p >= m.q) invalid("model.p must be smaller than model.q");
  } else if (m.kind == "finite_metric") {
    m.distances = f.need<std::vector<std::vector<double>>>("distances");
    if (m.distances.size() < 2) invalid("model.distances needs at least two points");
  } else if (m.kind == "two_point") {
    m.rho = f.real("rho", 1.0);
    if (!(m.rho > 0.0)) invalid("model.rho must be positive");
    m.distances = {{0.0, m.rho}, {m.rho, 0.0}};
  }
  f.finish();
  return m;
}

SeminormFamily model_family(const ModelDesc& m) {
  if (m.kind == "fuzzy_torus") return ergodic_seminorm(GroupActionModel(m.q, m.p));
  return SeminormFamily::finite_metric(m.distances);
}

double max_distance(const ModelDesc& m) {
  double d = 0.0;
  for (const auto& r : m.distances)
    for (double x : r) d = std::max(d, x);
  return d;
}

std::string weight_name(const GroupActionModel& model, const std::vector<double>& w, std::size_t index) {
  if (w == identity_weight(model)) return "identity";
  return "fejer_" + std::to_string(index);
}

std::vector<double> parse_weight(const GroupActionModel& model, const std::string& kind, std::size_t order) {
  if (kind == "uniform") return uniform_weight(model);
  if (kind == "identity") return identity_weight(model);
  if (kind == "fejer") return fejer_weight(model, order);
  invalid("unknown weight '" + kind + "' (uniform, identity, fejer)");
}

// ---------------------------------------------------------------------------------------------
// Commands

Report run_axioms(const ExperimentConfig& c) {
  const ModelDesc desc = parse_model(c.model, {"fuzzy_torus"});
  Fields p(c.params, "params");
  const auto names = p.get<std::vector<std::string>>("families", {"commutator", "action", "stabilized", "max"});
  const std::size_t max_level = p.count("max_level", 3, 1, 4);
  const std::size_t trials = p.count("trials", 200, 1, 100000);
  const std::size_t kernel_level = p.count("kernel_level", 3, 0, 3);
  const std::size_t entry_samples = p.count("entrywise_samples", 10, 0, 1000);
  p.finish();

  const GroupActionModel model(desc.q, desc.p);
  const ComplexMatrix dirac = model.clock() + model.clock().adjoint() + model.shift() + model.shift().adjoint();
  const SeminormFamily comm = SeminormFamily::commutator(model.system(), dirac);
  const SeminormFamily action = ergodic_seminorm(model);

  Builder b(c);
  for (std::size_t fi = 0; fi < names.size(); ++fi) {
    const std::string& name = names[fi];
    SeminormFamily f = comm;
    if (name == "action") {
      f = action;
    } else if (name == "stabilized") {
      f = SeminormFamily::stabilized(action, 2);
    } else if (name == "max") {
      f = SeminormFamily::max_of(comm, action);
    } else if (name != "commutator") {
      invalid("unknown family '" + name + "' (commutator, action, stabilized, max)");
    }
    const std::uint64_t seed = derive_seed(c.seed, fi);
    const double tol = 1e-9;

    const AxiomReport a = check_axioms(f, max_level, trials, seed);
    std::vector<std::size_t> rows{
        b.row(max_level, name + "/cases", static_cast<double>(a.cases), std::nullopt, "exact"),
        b.row(max_level, name + "/direct_sum_residual", a.direct_sum_max_residual, tol, "sampled"),
        b.row(max_level, name + "/bimodule_violation", a.bimodule_violation, tol, "sampled"),
        b.row(max_level, name + "/star_residual", a.star_residual, tol, "sampled"),
        b.row(max_level, name + "/scalar_residual", a.scalar_residual, tol, "sampled")};
    b.check(name + "/axioms",
            a.cases >= trials && a.direct_sum_max_residual <= tol && a.bimodule_violation <= tol &&
                a.star_residual <= tol && a.scalar_residual <= tol,
            rows);

    if (entry_samples > 0) {
      rows.clear();
      bool pass = true;
      for (std::size_t s = 1; s <= max_level; ++s) {
        double upper = 0.0, lower = 0.0;
        for (std::size_t t = 0; t < entry_samples; ++t) {
          const AmplifiedElement z = random_element(f.system(), s, derive_seed(seed, 1000 * s + t));
          const EntrywiseReport e = entrywise_bounds_check(f, z);
          upper = std::max(upper, e.upper_violation);
          lower = std::max(lower, e.lower_violation);
        }
        pass = pass && upper <= tol && lower <= tol;
        rows.push_back(b.row(s, name + "/entrywise_upper_violation", upper, tol, "sampled"));
        rows.push_back(b.row(s, name + "/entrywise_lower_violation", lower, tol, "sampled"));
      }
      b.check(name + "/entrywise", pass, rows);
    }

    if (kernel_level > 0 && (name == "commutator" || name == "action")) {
      rows.clear();
      const std::size_t k1 = kernel_basis(f, 1).cols();
      bool pass = true;
      for (std::size_t s = 1; s <= kernel_level; ++s) {
        const std::size_t ks = s == 1 ? k1 : kernel_basis(f, s).cols();
        pass = pass && ks == s * s * k1;
        rows.push_back(b.row(s, name + "/kernel_dim", static_cast<double>(ks), static_cast<double>(s * s * k1), "exact"));
      }
      b.check(name + "/kernel", pass, rows);
    }
  }
  return b.take();
}

UcpMap probability_state(const std::vector<double>& w, std::size_t n, const std::string& field) {
  if (w.size() != n) invalid("params." + field + " must have one weight per point");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) invalid("params." + field + " must be nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) invalid("params." + field + " must sum to 1");
  UcpMap s{1, {}};
  for (double x : w) s.values.push_back(ComplexMatrix{{x}});
  return s;
}

Report run_mk_dist(const ExperimentConfig& c) {
  const ModelDesc desc = parse_model(c.model, {"finite_metric", "two_point"});
  const std::size_t n = desc.distances.size();
  Fields p(c.params, "params");
  std::vector<double> first(n, 0.0), second(n, 0.0);
  first[0] = 1.0;
  second[n - 1] = 1.0;
  first = p.get("phi", first);
  second = p.get("psi", second);
  std::optional<double> expected;
  if (desc.kind == "two_point" && first == std::vector<double>{1.0, 0.0} && second == std::vector<double>{0.0, 1.0})
    expected = desc.rho;
  if (p.has("expected")) expected = p.real("expected", 0.0);
  p.finish();

  const SeminormFamily f = model_family(desc);
  const UcpMap phi = probability_state(first, n, "phi"), psi = probability_state(second, n, "psi");
  MkOptions o;
  o.solver = metrics_options(c);
  o.solver.ratio.seed = c.seed;
  o.oracle = c.oracle;
  const SolverReport forward = mk_distance(f, phi, psi, o);
  const SolverReport backward = mk_distance(f, psi, phi, o);

  Builder b(c);
  b.solver("mk_distance", forward);
  b.solver("mk_distance_reverse", backward);
  const std::size_t r0 = b.row(1, "mk_distance", forward.infinite ? INFINITY : forward.value, expected,
                               to_string(forward.certificate));
  const std::size_t r1 = b.row(1, "mk_distance_reverse", backward.infinite ? INFINITY : backward.value, expected,
                               to_string(backward.certificate));
  const double sym = forward.infinite == backward.infinite ? std::abs(forward.value - backward.value) : INFINITY;
  const std::size_t r2 = b.row(1, "symmetry_residual", sym, 1e-6, "exact");
  b.check("mk/symmetry", sym <= 1e-6, {r0, r1, r2});
  if (expected)
    b.check("mk/expected", !forward.infinite && std::abs(forward.value - *expected) <= 1e-3 * std::abs(*expected),
            {r0});
  return b.take();
}

Report run_diameter(const ExperimentConfig& c) {
  const ModelDesc desc = parse_model(c.model, {"fuzzy_torus", "finite_metric", "two_point"});
  Fields p(c.params, "params");
  const std::size_t max_level = p.count("max_level", 2, 1, 4);
  const std::size_t trials = p.count("trials", 16, 1, 100000);
  p.finish();

  const SeminormFamily f = model_family(desc);
  // Reference constant: eta(l) for the ergodic model, the diameter of the space otherwise.
  const double bound = desc.kind == "fuzzy_torus" ? GroupActionModel(desc.q, desc.p).eta() : max_distance(desc);
  const SolverReport r = finite_diameter_constant(f, max_level, trials, c.seed, metrics_options(c));
  Builder b(c);
  b.solver("diameter_constant", r);
  std::vector<std::size_t> rows;
  bool pass = true;
  for (std::size_t s = 1; s <= r.per_level.size(); ++s) {
    rows.push_back(b.row(s, "diameter_constant", r.per_level[s - 1], bound, to_string(r.certificate)));
    pass = pass && r.per_level[s - 1] <= bound + 1e-9;
  }
  b.check("diameter/bound", pass, rows);
  return b.take();
}

Report run_defect(const ExperimentConfig& c) {
  const ModelDesc desc = parse_model(c.model, {"fuzzy_torus"});
  Fields p(c.params, "params");
  const std::string weight = p.get<std::string>("weight", "uniform");
  const std::size_t order = p.count("order", 0, 0, 16);
  const std::size_t max_level = p.count("max_level", 2, 1, 4);
  const std::size_t trials = p.count("trials", 16, 1, 100000);
  p.finish();

  const GroupActionModel model(desc.q, desc.p);
  const ApproxPair pair = averaging_approximation(model, parse_weight(model, weight, order));
  const SolverReport r = approximation_defect(pair, ergodic_seminorm(model), max_level, trials, c.seed,
                                              metrics_options(c));
  Builder b(c);
  b.solver("defect", r);
  std::vector<std::size_t> rows;
  bool pass = true;
  for (std::size_t s = 1; s <= r.per_level.size(); ++s) {
    rows.push_back(b.row(s, "defect", r.per_level[s - 1], pair.analytic_defect_bound, to_string(r.certificate)));
    pass = pass && r.per_level[s - 1] <= pair.analytic_defect_bound + 1e-9;
  }
  b.check("defect/bound", pass, rows);
  return b.take();
}

Report run_ergodic(const ExperimentConfig& c) {
  const ModelDesc desc = parse_model(c.model, {"fuzzy_torus"});
  Fields p(c.params, "params");
  const std::size_t table_level = p.count("table_level", 3, 1, 4);
  const std::size_t table_trials = p.count("table_trials", 167, 1, 100000);
  const std::size_t diameter_level = p.count("diameter_level", 2, 0, 4);
  const std::size_t diameter_trials = p.count("diameter_trials", 16, 1, 100000);
  const std::size_t defect_level = p.count("defect_level", 1, 0, 4);
  const std::size_t defect_trials = p.count("defect_trials", 16, 1, 100000);
  p.finish();

  const GroupActionModel model(desc.q, desc.p);
  const SeminormFamily l = ergodic_seminorm(model);
  const std::size_t q = model.q();
  Builder b(c);

  const double fixed = static_cast<double>(model.fixed_point_dim());
  std::vector<std::size_t> rows{b.row(1, "relation_defect", model.relation_defect(), 1e-12, "exact"),
                                b.row(1, "action_defect", model.action_defect(), 1e-10, "exact"),
                                b.row(1, "length_axiom_violation", model.length_axiom_violation(), 1e-12, "exact"),
                                b.row(1, "fixed_point_dim", fixed, 1.0, "exact")};
  b.check("ergodic/model",
          model.relation_defect() <= 1e-12 && model.action_defect() <= 1e-10 &&
              model.length_axiom_violation() <= 1e-12 && fixed == 1.0,
          rows);

  Rng rng(derive_seed(c.seed, 1));
  const ComplexMatrix x = gaussian_matrix(rng, q, q);
  ComplexMatrix total(q, q);
  double idempotence = 0.0;
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t bb = 0; bb < q; ++bb) {
      const ComplexMatrix px = spectral_projection(model, a, bb, x);
      idempotence = std::max(idempotence, max_abs_diff(spectral_projection(model, a, bb, px), px));
      total += px;
    }
  const double sum_residual = max_abs_diff(total, x);
  rows = {b.row(1, "projection_sum_residual", sum_residual, 1e-10, "exact"),
          b.row(1, "projection_idempotence", idempotence, 1e-10, "exact")};
  b.check("ergodic/projections", sum_residual <= 1e-10 && idempotence <= 1e-10, rows);

  const auto weights = fejer_sequence(model);
  rows.clear();
  bool table_pass = true;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::string name = weight_name(model, weights[i], i);
    const DefectBoundReport r = check_defect_bound(model, weights[i], table_level, table_trials, derive_seed(c.seed, 100 + i));
    table_pass = table_pass && r.violations == 0;
    rows.push_back(b.row(table_level, "table_cases/" + name, static_cast<double>(r.cases), std::nullopt, "exact"));
    rows.push_back(b.row(table_level, "table_violations/" + name, static_cast<double>(r.violations), 0.0, "sampled"));
    rows.push_back(b.row(table_level, "table_max_ratio/" + name, r.max_ratio, 1.0, "sampled"));
  }
  b.check("ergodic/defect_table", table_pass, rows);

  const MetricsOptions opts = metrics_options(c);
  if (diameter_level > 0) {
    const SolverReport r = finite_diameter_constant(l, diameter_level, diameter_trials, derive_seed(c.seed, 2), opts);
    b.solver("diameter_constant", r);
    rows.clear();
    bool pass = true;
    for (std::size_t s = 1; s <= r.per_level.size(); ++s) {
      rows.push_back(b.row(s, "diameter_constant", r.per_level[s - 1], model.eta(), to_string(r.certificate)));
      pass = pass && r.per_level[s - 1] <= model.eta() + 1e-9;
    }
    b.check("ergodic/diameter", pass, rows);
  }

  if (defect_level > 0) {
    std::vector<std::size_t> bound_rows, mono_rows;
    bool bound_pass = true, mono_pass = true;
    double previous = INFINITY;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const std::string name = weight_name(model, weights[i], i);
      const ApproxPair pair = averaging_approximation(model, weights[i]);
      const SolverReport r = approximation_defect(pair, l, defect_level, defect_trials, derive_seed(c.seed, 200 + i), opts);
      b.solver("defect/" + name, r);
      const std::size_t row = b.row(defect_level, "defect/" + name, r.value, pair.analytic_defect_bound,
                                    to_string(r.certificate));
      bound_rows.push_back(row);
      mono_rows.push_back(row);
      bound_pass = bound_pass && r.value <= pair.analytic_defect_bound + 1e-9;
      mono_pass = mono_pass && r.value <= previous + 1e-9;
      previous = r.value;
    }
    b.check("ergodic/fejer_defect", bound_pass, bound_rows);
    b.check("ergodic/fejer_monotone", mono_pass, mono_rows);
  }
  return b.take();
}

Report run_torus(const ExperimentConfig& c) {
  Fields m(c.model, "model");
  const std::string kind = m.need<std::string>("kind");
  if (kind != "noncommutative_torus") invalid("model.kind must be noncommutative_torus");
  std::optional<TorusModel> model;
  if (m.has("theta")) {
    model = TorusModel::from_theta(m.real("theta", 0.0));
  } else {
    const long pp = static_cast<long>(m.count("p", 1, 0, 1000));
    model = TorusModel(pp, static_cast<long>(m.count("q", 3, 1, 1000)));
  }
  m.finish();
  Fields p(c.params, "params");
  const std::size_t max_level = p.count("max_level", 2, 1, 4);
  const std::size_t trials = p.count("trials", 50, 1, 100000);
  const int degree = static_cast<int>(p.count("degree", 3, 0, 8));
  const std::size_t grid = p.count("grid", 12, 1, 4096);
  const std::size_t lambdas = p.count("lambdas", 4, 1, 1000);
  const std::size_t refinement_polys = p.count("refinement_polynomials", 4, 0, 1000);
  const auto grids = p.get<std::vector<std::size_t>>("refinement_grids", {4, 8, 16, 32});
  p.finish();

  Builder b(c);
  const double rel = model->relation_defect();
  b.check("torus/relation", rel <= 1e-12, {b.row(1, "relation_defect", rel, 1e-12, "exact")});

  std::vector<std::size_t> action_rows, comp_rows;
  bool table_pass = true, comp_pass = true;
  for (std::size_t s = 1; s <= max_level; ++s) {
    const ActionDiracReport r = check_action_vs_dirac(*model, s, trials, derive_seed(c.seed, s), degree, grid, lambdas);
    action_rows.push_back(b.row(s, "cases", static_cast<double>(r.cases), std::nullopt, "exact"));
    action_rows.push_back(b.row(s, "action_violations", static_cast<double>(r.violations), 0.0, "sampled"));
    action_rows.push_back(b.row(s, "action_max_ratio", r.max_ratio, std::nullopt, "sampled"));
    comp_rows.push_back(b.row(s, "component_violations", static_cast<double>(r.component_violations), 0.0, "sampled"));
    table_pass = table_pass && r.violations == 0 && r.cases == trials * lambdas;
    comp_pass = comp_pass && r.component_violations == 0;
  }
  b.check("torus/action_bound", table_pass, action_rows);
  b.check("torus/components", comp_pass, comp_rows);

  std::vector<std::size_t> ref_rows;
  bool ref_pass = true;
  for (std::size_t i = 0; i < refinement_polys; ++i) {
    const TorusPolynomial x = random_torus_polynomial(1 + i % max_level, degree, derive_seed(c.seed, 1000 + i));
    for (int which = 0; which < 2; ++which) {
      const std::string name = indexed(which == 0 ? "symbol_norm" : "dirac_norm", i);
      std::optional<GridValue> prev;
      for (std::size_t g : grids) {
        const GridValue v = which == 0 ? model->norm(x, g) : model->dirac_seminorm(x, g);
        ref_rows.push_back(b.row(x.level, name + "/grid_" + std::to_string(g), v.value, v.value + v.error_bound,
                                 "lower_bound"));
        if (prev && g % prev->grid == 0)
          ref_pass = ref_pass && v.value >= prev->value && v.value - prev->value <= prev->error_bound;
        prev = v;
      }
    }
  }
  if (refinement_polys > 0) b.check("torus/refinement", ref_pass, ref_rows);
  return b.take();
}

ProductTriple sigma_product() { return external_product(pauli_even_triple(), pauli_even_triple()); }

Report run_product(const ExperimentConfig& c) {
  Fields m(c.model, "model");
  const std::string kind = m.need<std::string>("kind");
  if (kind != "sigma" && kind != "random") invalid("model.kind must be sigma or random");
  const std::size_t even_half = m.count("even_half_dim", 2, 1, 4);
  const std::size_t odd_dim = m.count("odd_dim", 3, 1, 8);
  const bool full = m.get<bool>("full_algebra", true);
  m.finish();
  Fields p(c.params, "params");
  const std::size_t max_level = p.count("max_level", 3, 1, 4);
  const std::size_t trials = p.count("trials", 200, 1, 100000);
  const std::size_t tensor_samples = p.count("tensor_samples", 500, 1, 100000);
  const std::size_t tensor_elements = p.count("tensor_elements", 20, 0, 10000);
  const double min_ratio = p.real("tensor_min_ratio", 0.9);
  p.finish();

  std::vector<ProductTriple> products;
  LipschitzTriple left_factor, right_factor;
  if (kind == "sigma") {
    products.push_back(sigma_product());
    left_factor = right_factor = pauli_even_triple();
  } else {
    const LipschitzTriple e1 = random_even_triple(even_half, full, derive_seed(c.seed, 11));
    const LipschitzTriple e2 = random_even_triple(even_half, full, derive_seed(c.seed, 12));
    const LipschitzTriple o1 = random_odd_triple(odd_dim, full, derive_seed(c.seed, 13));
    const LipschitzTriple o2 = random_odd_triple(odd_dim, full, derive_seed(c.seed, 14));
    products = {external_product(e1, e2), external_product(e1, o2), external_product(o1, e2),
                external_product(o1, o2)};
    left_factor = o1;
    right_factor = e2;
  }

  Builder b(c);
  const double tol = 1e-9, id_tol = 1e-10;
  for (std::size_t pi = 0; pi < products.size(); ++pi) {
    const ProductTriple& pr = products[pi];
    const std::string name = to_string(pr.parity_case);
    std::vector<std::size_t> rows;
    bool pass = true;
    for (std::size_t s = 1; s <= max_level; ++s) {
      const ProductInequalityReport r = check_product_inequality(pr, s, trials, derive_seed(c.seed, 100 * pi + s));
      rows.push_back(b.row(s, name + "/cases", static_cast<double>(r.cases), std::nullopt, "exact"));
      rows.push_back(b.row(s, name + "/max_violation", r.max_violation, tol, "sampled"));
      rows.push_back(b.row(s, name + "/recovery_residual", r.recovery_residual, id_tol, "sampled"));
      rows.push_back(b.row(s, name + "/grading_residual", r.grading_residual, id_tol, "exact"));
      rows.push_back(b.row(s, name + "/max_ratio", r.max_ratio, 1.0, "sampled"));
      pass = pass && r.cases == trials && r.max_violation <= tol && r.recovery_residual <= id_tol &&
             r.grading_residual <= id_tol;
    }
    b.check("product/" + name, pass, rows);
  }

  if (kind == "sigma") {
    const ProductTriple pr = sigma_product();
    const std::vector<double> ev = hermitian_eigenvalues(pr.result.dirac);
    std::vector<std::size_t> rows;
    bool pass = ev.size() == 4;
    for (std::size_t i = 0; i < ev.size(); ++i) {
      const double expected = i < ev.size() / 2 ? -std::sqrt(2.0) : std::sqrt(2.0);
      rows.push_back(b.row(1, indexed("eigenvalue", i), ev[i], expected, "exact"));
      pass = pass && std::abs(ev[i] - expected) <= id_tol;
    }
    const double square = even_square_law_residual(pr);
    rows.push_back(b.row(1, "square_law_residual", square, id_tol, "exact"));
    b.check("product/sigma_spectrum", pass && square <= id_tol, rows);
  }

  if (tensor_elements > 0) {
    const SeminormFamily left = left_factor.seminorm();
    const OperatorSystem& y = *right_factor.algebra;
    const SystemPtr t = std::make_shared<const OperatorSystem>(tensor(*left_factor.algebra, y));
    std::vector<std::size_t> rows;
    bool upper = true;
    double worst_ratio = INFINITY;
    for (std::size_t i = 0; i < tensor_elements; ++i) {
      const std::uint64_t seed = derive_seed(c.seed, 5000 + i);
      const AmplifiedElement z = random_element(*t, 1 + i % 2, seed);
      const double exact = tensor_seminorm_exact(left, y, z, t);
      const double sampled = tensor_seminorm_sampled(left, y, z, tensor_samples, seed);
      rows.push_back(b.row(z.level, indexed("tensor_sampled", i), sampled, exact, "lower_bound"));
      upper = upper && sampled <= exact + tol;
      if (exact > 0.0) worst_ratio = std::min(worst_ratio, sampled / exact);
    }
    const std::size_t ratio_row = b.row(1, "tensor_min_ratio", worst_ratio, min_ratio, "sampled");
    b.check("tensor/upper", upper, rows);
    b.check("tensor/reach", worst_ratio >= min_ratio, {ratio_row});
  }
  return b.take();
}

struct FactorDesc {
  std::size_t q = 2;
  std::size_t p = 1;
  std::string weight = "uniform";
  std::size_t order = 0;
};

FactorDesc parse_factor(const json& j, const std::string& where) {
  Fields f(j, where);
  FactorDesc s;
  if (f.get<std::string>("kind", "fuzzy_torus") != "fuzzy_torus") invalid(where + ".kind must be fuzzy_torus");
  s.q = f.count("q", 2, 2, 8);
  s.p = f.count("p", 1, 1, 7);
  if (s.p >= s.q) invalid(where + ".p must be smaller than q");
  s.weight = f.get<std::string>("weight", "uniform");
  s.order = f.count("order", 0, 0, 8);
  f.finish();
  return s;
}

Report run_tensor_certify(const ExperimentConfig& c) {
  Fields m(c.model, "model");
  const FactorDesc xs = parse_factor(m.raw("x"), "model.x");
  const FactorDesc ys = parse_factor(m.raw("y"), "model.y");
  m.finish();
  Fields p(c.params, "params");
  const double d = p.real("d", 1.0);
  const std::size_t max_level = p.count("max_level", 1, 1, 3);
  const std::size_t trials = p.count("trials", 10, 1, 100000);
  p.finish();

  const GroupActionModel mx(xs.q, xs.p), my(ys.q, ys.p);
  const SeminormFamily lx = ergodic_seminorm(mx), ly = ergodic_seminorm(my);
  const ApproxPair ax = averaging_approximation(mx, parse_weight(mx, xs.weight, xs.order));
  const ApproxPair ay = averaging_approximation(my, parse_weight(my, ys.weight, ys.order));
  const FactorData fx{lx, ax, ax.epsilon, mx.eta()};
  const FactorData fy{ly, ay, ay.epsilon, my.eta()};
  const SystemPtr t = std::make_shared<const OperatorSystem>(tensor(*mx.system(), *my.system()));
  const SeminormFamily mm =
      max_seminorm(SeminormFamily::tensor_left(lx, t, ys.q), SeminormFamily::tensor_right(xs.q, ly, t));
  const TensorCertification r = tensor_product_certification(fx, fy, mm, d, max_level, trials, c.seed, metrics_options(c));

  Builder b(c);
  b.solver("tensor_defect", r.defect_report);
  b.solver("tensor_diameter", r.diameter_report);
  const std::size_t h = b.row(max_level, "hypothesis_ratio", r.hypothesis_ratio, d, "sampled");
  b.check("tensor/hypothesis", r.hypothesis_ratio <= d + 1e-9, {h});
  std::vector<std::size_t> rows;
  for (std::size_t s = 1; s <= r.defect_report.per_level.size(); ++s)
    rows.push_back(b.row(s, "tensor_defect", r.defect_report.per_level[s - 1], r.defect_bound,
                         to_string(r.defect_report.certificate)));
  b.check("tensor/defect", r.defect <= r.defect_bound + 1e-6, rows);
  rows.clear();
  for (std::size_t s = 1; s <= r.diameter_report.per_level.size(); ++s)
    rows.push_back(b.row(s, "tensor_diameter", r.diameter_report.per_level[s - 1], r.diameter_bound,
                         to_string(r.diameter_report.certificate)));
  b.check("tensor/diameter", r.diameter <= r.diameter_bound + 1e-6, rows);
  return b.take();
}

Report run_covering(const ExperimentConfig& c) {
  const ModelDesc desc = parse_model(c.model, {"fuzzy_torus", "finite_metric", "two_point"});
  Fields p(c.params, "params");
  auto eps = p.get<std::vector<double>>("eps", {0.5, 0.25, 0.125});
  const std::size_t samples = p.count("samples", 200, 1, 100000);
  p.finish();
  for (double e : eps)
    if (!(e > 0.0)) invalid("params.eps must be positive");
  std::sort(eps.begin(), eps.end(), std::greater<>());

  const SeminormFamily f = model_family(desc);
  Builder b(c);
  std::vector<std::size_t> rows;
  std::vector<std::size_t> two_point_rows;
  bool monotone = true, two_point_ok = true;
  std::size_t previous = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const CoveringReport r = covering_diagnostic(f, eps[i], samples, c.seed);
    std::optional<double> ref;
    if (desc.kind == "two_point") ref = std::ceil(desc.rho / (2.0 * eps[i]));
    const std::size_t row = b.row(1, "net_size/eps_" + format_real(eps[i]), static_cast<double>(r.net_size), ref,
                                  "sampled");
    rows.push_back(row);
    monotone = monotone && r.net_size >= previous;
    previous = r.net_size;
    if (ref) {
      two_point_rows.push_back(row);
      two_point_ok = two_point_ok && std::abs(static_cast<double>(r.net_size) - *ref) <= 1.0;
    }
    if (i == 0) rows.push_back(b.row(1, "max_radius", r.max_radius, std::nullopt, "sampled"));
  }
  b.check("covering/monotone", monotone, rows);
  if (!two_point_rows.empty()) b.check("covering/two_point", two_point_ok, two_point_rows);
  return b.take();
}

// ---------------------------------------------------------------------------------------------
// Serialization helpers

json real_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return std::strtod(format_real(v).c_str(), nullptr);
}

double real_from(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "nan") return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    fail(ErrorKind::io_error, "bad real '" + s + "'");
  }
  return j.get<double>();
}

json reals_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(real_json(x));
  return a;
}

std::vector<double> reals_from(const json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(real_from(x));
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

const char* to_string(Command c) {
  switch (c) {
    case Command::axioms: return "axioms";
    case Command::mk_dist: return "mk-dist";
    case Command::diameter: return "diameter";
    case Command::defect: return "defect";
    case Command::ergodic: return "ergodic";
    case Command::torus: return "torus";
    case Command::product: return "product";
    case Command::tensor_certify: return "tensor-certify";
    case Command::covering: return "covering";
  }
  return "?";
}

Command parse_command(const std::string& name) {
  for (Command c : kCommands)
    if (name == to_string(c)) return c;
  invalid("unknown command '" + name + "'");
}

ExperimentConfig parse_config(const json& j) {
  Fields f(j, "config");
  ExperimentConfig c;
  c.schema = f.need<std::string>("schema");
  if (c.schema != kSchema) invalid("unsupported schema '" + c.schema + "', expected " + kSchema);
  c.command = parse_command(f.need<std::string>("command"));
  c.seed = parse_seed(f.raw("seed"));
  c.experiment_id = f.get<std::string>("experiment_id", to_string(c.command));
  if (c.experiment_id.empty() || c.experiment_id.find_first_of("/\\") != std::string::npos)
    invalid("experiment_id must be a nonempty file name");
  c.model = f.get<json>("model", json::object());
  c.params = f.get<json>("params", json::object());
  if (!c.model.is_object()) invalid("model must be an object");
  if (!c.params.is_object()) invalid("params must be an object");
  c.oracle = f.get<bool>("oracle", false);
  if (f.has("solver")) {
    Fields s(f.raw("solver"), "solver");
    c.solver.restarts = static_cast<int>(s.count("restarts", 4, 1, 1000));
    c.solver.iterations = static_cast<int>(s.count("iterations", 150, 1, 100000));
    c.solver.quotient_restarts = static_cast<int>(s.count("quotient_restarts", 3, 1, 1000));
    c.solver.quotient_iterations = static_cast<int>(s.count("quotient_iterations", 300, 1, 100000));
    c.solver.screening_samples = s.count("screening_samples", 64, 0, 100000);
    c.solver.require_convergence = s.get<bool>("require_convergence", false);
    s.finish();
  }
  if (f.has("output")) {
    Fields o(f.raw("output"), "output");
    c.out_dir = o.get<std::string>("dir", c.out_dir);
    c.format = o.get<std::string>("format", c.format);
    o.finish();
  }
  if (c.format != "csv" && c.format != "json") invalid("output.format must be csv or json");
  f.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    invalid("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  return json{{"schema", c.schema},
              {"command", to_string(c.command)},
              {"experiment_id", c.experiment_id},
              {"seed", c.seed},
              {"model", c.model},
              {"params", c.params},
              {"oracle", c.oracle},
              {"solver",
               {{"restarts", c.solver.restarts},
                {"iterations", c.solver.iterations},
                {"quotient_restarts", c.solver.quotient_restarts},
                {"quotient_iterations", c.solver.quotient_iterations},
                {"screening_samples", c.solver.screening_samples},
                {"require_convergence", c.solver.require_convergence}}},
              {"output", {{"dir", c.out_dir}, {"format", c.format}}}};
}

bool Report::all_pass() const {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return true;
}

bool Report::all_converged() const {
  for (const SolverRecord& r : solver_reports)
    if (!r.converged) return false;
  return true;
}

Report execute(const ExperimentConfig& config) {
  switch (config.command) {
    case Command::axioms: return run_axioms(config);
    case Command::mk_dist: return run_mk_dist(config);
    case Command::diameter: return run_diameter(config);
    case Command::defect: return run_defect(config);
    case Command::ergodic: return run_ergodic(config);
    case Command::torus: return run_torus(config);
    case Command::product: return run_product(config);
    case Command::tensor_certify: return run_tensor_certify(config);
    case Command::covering: return run_covering(config);
  }
  invalid("unknown command");
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string to_csv(const Report& report) {
  std::string out = "experiment_id,level_s,quantity,value,bound,certificate,seed\n";
  for (const Row& r : report.rows) {
    out += csv_field(r.experiment_id) + ',' + std::to_string(r.level_s) + ',' + csv_field(r.quantity) + ',' +
           format_real(r.value) + ',' + (r.bound ? format_real(*r.bound) : std::string()) + ',' +
           csv_field(r.certificate) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

json to_json(const Report& report) {
  json rows = json::array();
  for (const Row& r : report.rows)
    rows.push_back({{"experiment_id", r.experiment_id},
                    {"level_s", r.level_s},
                    {"quantity", r.quantity},
                    {"value", real_json(r.value)},
                    {"bound", r.bound ? real_json(*r.bound) : json(nullptr)},
                    {"certificate", r.certificate},
                    {"seed", r.seed}});
  json checks = json::array();
  for (const Check& c : report.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"rows", c.rows}});
  json solvers = json::array();
  for (const SolverRecord& s : report.solver_reports)
    solvers.push_back({{"name", s.name},
                       {"value", real_json(s.value)},
                       {"certificate", s.certificate},
                       {"iterations", s.iterations},
                       {"restarts", s.restarts},
                       {"seed", s.seed},
                       {"residual_history", reals_json(s.residual_history)},
                       {"per_level", reals_json(s.per_level)},
                       {"converged", s.converged},
                       {"infinite", s.infinite}});
  return json{{"experiment_id", report.experiment_id},
              {"command", report.command},
              {"seed", report.seed},
              {"rows", rows},
              {"checks", checks},
              {"solver_reports", solvers}};
}

Report report_from_json(const json& j) {
  try {
    Report r;
    r.experiment_id = j.at("experiment_id").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& x : j.at("rows")) {
      Row row;
      row.experiment_id = x.at("experiment_id").get<std::string>();
      row.level_s = x.at("level_s").get<std::size_t>();
      row.quantity = x.at("quantity").get<std::string>();
      row.value = real_from(x.at("value"));
      if (!x.at("bound").is_null()) row.bound = real_from(x.at("bound"));
      row.certificate = x.at("certificate").get<std::string>();
      row.seed = x.at("seed").get<std::uint64_t>();
      r.rows.push_back(std::move(row));
    }
    for (const auto& x : j.at("checks"))
      r.checks.push_back({x.at("name").get<std::string>(), x.at("pass").get<bool>(),
                          x.at("rows").get<std::vector<std::size_t>>()});
    for (const auto& x : j.at("solver_reports")) {
      SolverRecord s;
      s.name = x.at("name").get<std::string>();
      s.value = real_from(x.at("value"));
      s.certificate = x.at("certificate").get<std::string>();
      s.iterations = x.at("iterations").get<int>();
      s.restarts = x.at("restarts").get<int>();
      s.seed = x.at("seed").get<std::uint64_t>();
      s.residual_history = reals_from(x.at("residual_history"));
      s.per_level = reals_from(x.at("per_level"));
      s.converged = x.at("converged").get<bool>();
      s.infinite = x.at("infinite").get<bool>();
      r.solver_reports.push_back(std::move(s));
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::io_error, std::string("malformed report: ") + e.what());
  }
}

json to_json(const RunManifest& m) {
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) entries.push_back({{"check", e.check}, {"pass", e.pass}, {"rows", e.rows}});
  return json{{"config_hash", m.config_hash},
              {"artifact_version", m.artifact_version},
              {"experiment_id", m.experiment_id},
              {"wall_clock_seconds", m.wall_clock_seconds},
              {"finished_at", utc_timestamp()},
              {"entries", entries},
              {"produced_files", m.produced_files},
              {"all_pass", m.all_pass},
              {"partial", m.partial},
              {"exit_code", m.exit_code}};
}

void write_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io_error, "cannot open " + tmp + " for writing");
    out << contents;
    out.flush();
    if (!out) fail(ErrorKind::io_error, "write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::io_error, "rename " + tmp + " -> " + path + ": " + ec.message());
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunManifest run(const ExperimentConfig& config, Report* report_out) {
  const auto start = std::chrono::steady_clock::now();
  const Report report = execute(config);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) fail(ErrorKind::io_error, "cannot create " + config.out_dir + ": " + ec.message());
  const std::string data = (fs::path(config.out_dir) / (config.experiment_id + "." + config.format)).string();
  write_atomic(data, config.format == "csv" ? to_csv(report) : to_json(report).dump(2) + "\n");

  RunManifest m;
  m.config_hash = config_hash(config);
  m.experiment_id = config.experiment_id;
  for (const Check& c : report.checks) m.entries.push_back({c.name, c.pass, c.rows});
  m.produced_files.push_back(data);
  m.all_pass = report.all_pass();
  m.partial = !report.all_converged();
  m.exit_code = m.partial && config.solver.require_convergence ? 3 : (m.all_pass ? 0 : 1);

  const std::string manifest = (fs::path(config.out_dir) / (config.experiment_id + ".manifest.json")).string();
  m.produced_files.push_back(manifest);
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_atomic(manifest, to_json(m).dump(2) + "\n");
  if (report_out) *report_out = report;
  return m;
}

void apply_thread_cap() {
  const char* env = std::getenv("QMS_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) invalid(std::string("QMS_THREADS must be a positive integer, got '") + env + "'");
  kernels::set_max_threads(static_cast<int>(n));
}

}  // namespace qms::cli
