#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "gradflow/cli.hpp"
#include "gradflow/error.hpp"
#include "gradflow/special_fn.hpp"

namespace gradflow::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json problem_json(const ProblemConfig& p, const Problem& built) {
  json j{{"name", p.name}, {"dimension", p.dimension}};
  if (p.name == "quadratic") {
    json rows = json::array();
    for (Eigen::Index r = 0; r < p.matrix.rows(); ++r) rows.push_back(to_json(p.matrix.row(r).transpose()));
    j["matrix"] = rows;
  }
  j["lipschitz"] = optional_json(built.lipschitz());
  j["strong_convexity"] = optional_json(built.strong_convexity());
  return j;
}

json flow_json(const FlowLaw& law) {
  json j{{"variant", std::string(variant_name(law.variant))},
         {"rho", law.rho},
         {"alpha", law.alpha},
         {"delta", law.delta}};
  if (law.variant == FlowVariant::FixedTimeSecondOrder) j["lambda"] = law.lambda;
  if (law.variant == FlowVariant::FixedTimeFractional) j["beta"] = law.beta;
  return j;
}

json sim_json(const SimOptions& s) {
  return json{{"step", s.step},
              {"horizon", s.horizon},
              {"eps_x", s.eps_x},
              {"eps_g", s.eps_g},
              {"record_stride", s.record_stride}};
}

json bound_json(const BoundReport& r) {
  json inputs = json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) inputs[key] = *v;
  };
  put("lipschitz", r.inputs.lipschitz);
  put("strong_convexity", r.inputs.strong_convexity);
  put("rho", r.inputs.rho);
  put("alpha", r.inputs.alpha);
  put("lambda", r.inputs.lambda);
  put("beta", r.inputs.beta);
  put("distance", r.inputs.distance);
  json j{{"kind", std::string(bound_kind_name(r.kind))}, {"bound", r.bound}, {"inputs", inputs}};
  j["alternate_bound"] = optional_json(r.alternate_bound);
  j["observed"] = optional_json(r.observed);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

json run_json(const ExperimentConfig& cfg, const Problem& problem, const RunResult& run,
              const char* command) {
  json j{{"schema_version", kSchemaVersion},
         {"command", command},
         {"label", run.label},
         {"problem", problem_json(cfg.problem, problem)},
         {"flow", flow_json(run.spec.law)},
         {"initial_condition", to_json(run.spec.x0)},
         {"sim", sim_json(cfg.sim)},
         {"status", std::string(run_status_name(run.status))}};
  if (run.trajectory) {
    const Trajectory& tr = *run.trajectory;
    j["convergence_time"] = optional_json(tr.convergence_time);
    j["steps"] = tr.steps;
    j["final_state"] = to_json(tr.final_state);
    j["final_theta"] = tr.has_theta ? json(tr.final_theta) : json(nullptr);
    j["diagnostics"] = json{{"lyapunov_initial", tr.lyapunov_initial},
                            {"max_lyapunov_uptick", tr.max_lyapunov_uptick},
                            {"min_theta", tr.min_theta}};
  } else {
    j["convergence_time"] = nullptr;
  }
  if (run.bound.report) {
    j["bound"] = bound_json(*run.bound.report);
  } else {
    j["bound"] = nullptr;
    if (!run.bound.unavailable_reason.empty()) j["bound_unavailable"] = run.bound.unavailable_reason;
  }
  if (!run.error.empty()) j["error"] = run.error;
  return j;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.step) cfg.sim.step = *o.step;
  if (o.horizon) cfg.sim.horizon = *o.horizon;
  try {
    cfg.sim.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  write_trajectory_csv(os, tr);
  return os.str();
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}'", dir.string()));
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  const Eigen::Index n = tr.final_state.size();
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  os << ",theta,V\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::string line = fmt::format("{:.9g}", tr.times[k]);
    for (Eigen::Index i = 0; i < n; ++i) line += fmt::format(",{:.9g}", tr.states[k][i]);
    line += tr.has_theta ? fmt::format(",{:.9g}", tr.thetas[k]) : std::string(",");
    line += tr.has_lyapunov ? fmt::format(",{:.9g}", tr.lyapunov[k]) : std::string(",");
    os << line << '\n';
  }
}

int cmd_run(const fs::path& config, const Overrides& overrides, std::ostream& out,
            std::ostream& err) {
  ExperimentConfig cfg;
  std::optional<Problem> problem;
  try {
    cfg = load_config(config);
    apply_overrides(cfg, overrides);
    if (cfg.initial_conditions.size() != 1)
      throw ConfigError(fmt::format("run needs exactly one initial condition, got {}",
                                    cfg.initial_conditions.size()));
    problem.emplace(build_problem(cfg.problem));
    prepare_out_dir(overrides.out_dir);
  } catch (const Error& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  }

  auto results = sweep(*problem, {{cfg.prefix, cfg.flow, cfg.initial_conditions.front()}}, cfg.sim);
  const RunResult& run = results.front();
  const fs::path csv = overrides.out_dir / (cfg.prefix + ".csv");
  const fs::path report = overrides.out_dir / (cfg.prefix + ".json");
  try {
    if (run.trajectory) write_text(csv, trajectory_csv(*run.trajectory));
    write_text(report, run_json(cfg, *problem, run, "run").dump(2) + "\n");
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitSimulation;
  }

  if (!run.trajectory) {
    fmt::print(err, "simulation failed: {}\n", run.error);
    return kExitSimulation;
  }
  const Trajectory& tr = *run.trajectory;
  if (tr.convergence_time)
    fmt::print(out, "converged at t = {:.6g} after {} steps\n", *tr.convergence_time, tr.steps);
  else
    fmt::print(out, "no convergence before t = {:.6g}\n", cfg.sim.horizon);
  if (run.bound.report)
    fmt::print(out, "bound ({}): {:.6g}\n", bound_kind_name(run.bound.report->kind),
               run.bound.report->bound);
  else
    fmt::print(out, "bound unavailable: {}\n", run.bound.unavailable_reason);
  fmt::print(out, "wrote {} and {}\n", csv.string(), report.string());
  return kExitOk;
}

int cmd_sweep(const fs::path& config, const Overrides& overrides, std::ostream& out,
              std::ostream& err) {
  ExperimentConfig cfg;
  std::optional<Problem> problem;
  std::vector<RunSpec> specs;
  try {
    cfg = load_config(config);
    apply_overrides(cfg, overrides);
    problem.emplace(build_problem(cfg.problem));
    switch (cfg.variations.kind) {
      case VariationConfig::Kind::None:
        throw ConfigError("sweep needs a 'variations' block");
      case VariationConfig::Kind::InitialConditions:
        specs = vary_initial_conditions(cfg.flow, cfg.variations.initial_conditions);
        break;
      case VariationConfig::Kind::Parameter:
        if (cfg.initial_conditions.size() != 1)
          throw ConfigError("a parameter sweep needs exactly one initial condition");
        specs = vary_parameter(cfg.flow, cfg.initial_conditions.front(), cfg.variations.parameter,
                               cfg.variations.values);
        for (const auto& s : specs) {
          try {
            s.law.validate();
          } catch (const DomainError& e) {
            throw ConfigError(fmt::format("variation '{}': {}", s.label, e.what()));
          }
        }
        break;
    }
    prepare_out_dir(overrides.out_dir);
  } catch (const Error& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfig;
  }

  const auto results = sweep(*problem, specs, cfg.sim);
  std::string summary = "label,convergence_time,bound,status\n";
  std::size_t succeeded = 0;
  try {
    for (const auto& r : results) {
      const std::string label = sanitize_label(r.label);
      if (r.trajectory) {
        ++succeeded;
        write_text(overrides.out_dir / fmt::format("{}_{}.csv", cfg.prefix, label),
                   trajectory_csv(*r.trajectory));
      } else {
        fmt::print(err, "run {} {}: {}\n", r.label, run_status_name(r.status), r.error);
      }
      const auto tc = r.trajectory ? r.trajectory->convergence_time : std::nullopt;
      summary += fmt::format("{},{},{},{}\n", label, tc ? fmt::format("{:.9g}", *tc) : "",
                             r.bound.report ? fmt::format("{:.9g}", r.bound.report->bound) : "",
                             run_status_name(r.status));
      fmt::print(out, "{:<16} {:>12} {:>12} {}\n", label,
                 tc ? fmt::format("{:.6g}", *tc) : "-",
                 r.bound.report ? fmt::format("{:.6g}", r.bound.report->bound) : "-",
                 run_status_name(r.status));
    }
    write_text(overrides.out_dir / (cfg.prefix + "_summary.csv"), summary);
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitSimulation;
  }
  return succeeded > 0 ? kExitOk : kExitSimulation;
}

int cmd_ml_eval(double alpha, double beta, double z, std::ostream& out, std::ostream& err) {
  try {
    fmt::print(out, "{:.15g}\n", special::ml_eval({alpha, beta}, z));
    return kExitOk;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }
}

int cmd_ml_zero(double alpha, double rho, const std::string& kind, std::ostream& out,
                std::ostream& err) {
  try {
    special::ZeroKind k;
    if (kind == "standard") k = special::ZeroKind::Standard;
    else if (kind == "kernel") k = special::ZeroKind::Kernel;
    else throw ConfigError(fmt::format("unknown zero kind '{}' (standard or kernel)", kind));
    fmt::print(out, "{:.10g}\n", special::ml_first_positive_zero({alpha, rho, k}));
    return kExitOk;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }
}

std::vector<std::pair<double, double>> ml_table(double rho) {
  std::vector<std::pair<double, double>> rows;
  for (double a : {1.7, 1.5, 1.3, 1.1, 1.05})
    rows.emplace_back(a, special::ml_first_positive_zero({a, rho, special::ZeroKind::Standard}));
  return rows;
}

int cmd_ml_table(double rho, std::ostream& out, std::ostream& err) {
  try {
    const auto rows = ml_table(rho);
    fmt::print(out, "order,first_zero\n");
    for (const auto& [a, z] : rows) fmt::print(out, "{},{:.6f}\n", a, z);
    return kExitOk;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitConfig;
  }
}

std::vector<BoundLine> evaluate_bounds(const BoundsArgs& a) {
  std::vector<BoundLine> lines;
  auto attempt = [&](std::string name, auto&& missing, auto&& compute) {
    BoundLine line{std::move(name), std::nullopt, missing()};
    if (line.reason.empty()) {
      try {
        line.report = compute();
      } catch (const ConditionNotMetError& e) {
        line.reason = fmt::format("condition not met: {}", e.inequality());
      } catch (const Error& e) {
        line.reason = e.what();
      }
    }
    lines.push_back(std::move(line));
  };
  auto need = [&](std::initializer_list<std::pair<const char*, const std::optional<double>*>> req) {
    std::string miss;
    for (const auto& [name, v] : req)
      if (!v->has_value()) miss += miss.empty() ? name : fmt::format(", {}", name);
    return miss.empty() ? std::string() : fmt::format("missing {}", miss);
  };

  const bool quadratic_rate = a.alpha && *a.alpha == 2.0;
  attempt(
      quadratic_rate ? "finite_time_alpha2" : "finite_time_general",
      [&] {
        if (quadratic_rate) return need({{"L", &a.lipschitz}, {"rho", &a.rho}, {"d", &a.distance}});
        return need({{"L", &a.lipschitz},
                     {"mu", &a.strong_convexity},
                     {"rho", &a.rho},
                     {"alpha", &a.alpha},
                     {"d", &a.distance}});
      },
      [&] {
        return bound_finite_time(*a.lipschitz, a.strong_convexity, *a.rho, *a.alpha, *a.distance);
      });
  attempt(
      "second_order_fixed_time",
      [&] {
        return need({{"L", &a.lipschitz},
                     {"mu", &a.strong_convexity},
                     {"rho", &a.rho},
                     {"alpha", &a.alpha},
                     {"lambda", &a.lambda}});
      },
      [&] {
        return bound_fixed_time_second_order(*a.lipschitz, *a.strong_convexity, *a.rho, *a.alpha,
                                             *a.lambda);
      });
  attempt(
      "fractional_fixed_time",
      [&] {
        return need({{"L", &a.lipschitz},
                     {"mu", &a.strong_convexity},
                     {"rho", &a.rho},
                     {"alpha", &a.alpha},
                     {"beta", &a.beta}});
      },
      [&] {
        return bound_fixed_time_fractional(*a.lipschitz, *a.strong_convexity, *a.rho, *a.alpha,
                                           *a.beta);
      });
  return lines;
}

int cmd_bounds(const BoundsArgs& args, std::ostream& out, std::ostream& err) {
  std::size_t applicable = 0;
  for (const auto& line : evaluate_bounds(args)) {
    if (line.report) {
      ++applicable;
      fmt::print(out, "{}: {:.9g}\n", line.name, line.report->bound);
      if (line.report->alternate_bound)
        fmt::print(out, "  alternate: {:.9g}\n", *line.report->alternate_bound);
      if (!line.report->note.empty()) fmt::print(out, "  note: {}\n", line.report->note);
    } else {
      fmt::print(out, "{}: inapplicable ({})\n", line.name, line.reason);
    }
  }
  if (applicable == 0) {
    fmt::print(err, "no bound applies to the given constants\n");
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace gradflow::cli
