#include "gradflow/sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include <fmt/format.h>

#include "gradflow/error.hpp"
#include "gradflow/fractional.hpp"

namespace gradflow {

namespace {

constexpr double kDivergenceRadius = 1e8;

// Heun steps for x, with recursive halving when the predictor slope turns
// against the starting slope. Scratch vectors are kept per recursion depth.
class HeunStepper {
 public:
  HeunStepper(const FlowLaw& law, const Problem& problem, int max_depth)
      : law_(law), problem_(problem), max_depth_(max_depth) {
    scratch_.resize(static_cast<std::size_t>(max_depth) + 1);
    for (auto& s : scratch_) {
      s.grad.resize(problem.dimension());
      s.f1.resize(problem.dimension());
      s.f2.resize(problem.dimension());
      s.xp.resize(problem.dimension());
    }
  }

  // x and theta both follow the ODE (theta' = 0 for the finite-time law).
  void step(Vector& x, double& theta, double h, int depth = 0) {
    Scratch& s = scratch_[static_cast<std::size_t>(depth)];
    const double n1 = position_field(law_, problem_, x, theta, s.grad, s.f1);
    const double r1 = gain_rate(law_, n1, theta);
    s.xp = x + h * s.f1;
    const double thp = theta + h * r1;
    const double n2 = position_field(law_, problem_, s.xp, thp, s.grad, s.f2);
    if (depth < max_depth_ && overshoots(s)) {
      step(x, theta, 0.5 * h, depth + 1);
      step(x, theta, 0.5 * h, depth + 1);
      return;
    }
    const double r2 = gain_rate(law_, n2, thp);
    x += (0.5 * h) * (s.f1 + s.f2);
    theta += 0.5 * h * (r1 + r2);
  }

  // x only; theta moves linearly from th0 to th1 across the step.
  void step_prescribed(Vector& x, double th0, double th1, double h, int depth = 0) {
    Scratch& s = scratch_[static_cast<std::size_t>(depth)];
    position_field(law_, problem_, x, th0, s.grad, s.f1);
    s.xp = x + h * s.f1;
    position_field(law_, problem_, s.xp, th1, s.grad, s.f2);
    if (depth < max_depth_ && overshoots(s)) {
      const double mid = 0.5 * (th0 + th1);
      step_prescribed(x, th0, mid, 0.5 * h, depth + 1);
      step_prescribed(x, mid, th1, 0.5 * h, depth + 1);
      return;
    }
    x += (0.5 * h) * (s.f1 + s.f2);
  }

 private:
  struct Scratch {
    Vector grad, f1, f2, xp;
  };

  static bool overshoots(const Scratch& s) {
    return (s.f2 - s.f1).norm() > std::max(s.f1.norm(), s.f2.norm());
  }

  const FlowLaw& law_;
  const Problem& problem_;
  int max_depth_;
  std::vector<Scratch> scratch_;
};

}  // namespace

void SimOptions::validate() const {
  if (!(step > 0.0) || !std::isfinite(step))
    throw DomainError(fmt::format("sim: step must be positive, got {}", step));
  if (!(horizon > step) || !std::isfinite(horizon))
    throw DomainError(fmt::format("sim: horizon {} must exceed the step {}", horizon, step));
  if (!(eps_x > 0.0) || !(eps_g > 0.0))
    throw DomainError("sim: convergence tolerances must be positive");
  if (record_stride < 1) throw DomainError("sim: record_stride must be >= 1");
  if (max_subdivision < 0) throw DomainError("sim: max_subdivision must be >= 0");
}

std::size_t SimOptions::step_count() const {
  return static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
}

const Vector& Trajectory::state_at(double t) const {
  if (times.empty() || t >= times.back()) return final_state;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times.begin() - 1, 0));
  return states[idx];
}

Trajectory integrate(const FlowLaw& law, const Problem& problem, const Vector& x0,
                     const SimOptions& opts) {
  law.validate();
  opts.validate();
  if (x0.size() != problem.dimension())
    throw DomainError(fmt::format("sim: initial condition has size {}, problem has dimension {}",
                                  x0.size(), problem.dimension()));
  if (!x0.allFinite()) throw DomainError("sim: initial condition is not finite");

  const bool fractional = law.variant == FlowVariant::FixedTimeFractional;
  const auto& xstar = problem.minimizer();
  const std::size_t n_steps = opts.step_count();
  const double h = opts.step;

  Trajectory tr;
  tr.has_theta = law.has_gain();
  tr.has_lyapunov = xstar.has_value();

  Vector x = x0;
  double theta = 0.0;
  Vector grad(problem.dimension());
  HeunStepper stepper(law, problem, opts.max_subdivision);

  std::optional<fractional::CaputoChannel> channel;
  if (fractional) {
    channel.emplace(law.beta, h, 0.0, opts.execution);
    problem.gradient(x, grad);
    channel->start(gain_rate(law, grad.norm(), theta));
  }

  auto lyapunov = [&](const Vector& v) { return xstar ? (v - *xstar).squaredNorm() : 0.0; };
  auto converged = [&](const Vector& v) {
    if (xstar) return (v - *xstar).norm() <= opts.eps_x;
    problem.gradient(v, grad);
    return grad.norm() <= opts.eps_g;
  };

  std::size_t last_recorded = static_cast<std::size_t>(-1);
  auto record = [&](std::size_t k) {
    if (k == last_recorded) return;
    last_recorded = k;
    tr.times.push_back(static_cast<double>(k) * h);
    tr.states.push_back(x);
    if (tr.has_theta) tr.thetas.push_back(theta);
    if (tr.has_lyapunov) tr.lyapunov.push_back(lyapunov(x));
  };

  double v_prev = lyapunov(x);
  tr.lyapunov_initial = v_prev;
  std::size_t k = 0;
  for (;; ++k) {
    const double t = static_cast<double>(k) * h;
    if (converged(x)) {
      tr.convergence_time = t;
      record(k);
      break;
    }
    if (k % opts.record_stride == 0) record(k);
    if (k == n_steps) {
      record(k);
      break;
    }

    if (fractional) {
      const double predicted = channel->predict();
      stepper.step_prescribed(x, theta, predicted, h);
      if (x.allFinite()) {
        problem.gradient(x, grad);
        theta = channel->advance(gain_rate(law, grad.norm(), theta));
      }
    } else {
      stepper.step(x, theta, h);
    }

    if (!x.allFinite() || !std::isfinite(theta) || x.norm() > kDivergenceRadius)
      throw DivergenceError(
          fmt::format("sim: state left the finite region after t = {}", t), t);

    const double v = lyapunov(x);
    tr.max_lyapunov_uptick = std::max(tr.max_lyapunov_uptick, v - v_prev);
    v_prev = v;
    tr.min_theta = std::min(tr.min_theta, theta);
  }

  tr.steps = k;
  tr.final_state = x;
  tr.final_theta = theta;
  return tr;
}

std::string_view run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::NotConverged: return "not_converged";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Failed: return "failed";
  }
  return "unknown";
}

std::vector<RunResult> sweep(const Problem& problem, const std::vector<RunSpec>& runs,
                             const SimOptions& opts) {
  std::vector<RunResult> results(runs.size());
  const bool parallel = opts.execution == Execution::Parallel && runs.size() > 1;
  SimOptions inner = opts;
  // Runs are the unit of parallel work; each one integrates serially.
  if (parallel) inner.execution = Execution::Serial;

  const auto count = static_cast<std::ptrdiff_t>(runs.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    const RunSpec& spec = runs[static_cast<std::size_t>(i)];
    RunResult& res = results[static_cast<std::size_t>(i)];
    res.label = spec.label;
    res.spec = spec;
    try {
      res.trajectory = integrate(spec.law, problem, spec.x0, inner);
      res.status = res.trajectory->convergence_time ? RunStatus::Converged
                                                    : RunStatus::NotConverged;
      res.bound = applicable_bound(spec.law, problem, spec.x0);
      if (res.bound.report) res.bound.report->observed = res.trajectory->convergence_time;
    } catch (const DivergenceError& e) {
      res.status = RunStatus::Diverged;
      res.error = e.what();
    } catch (const std::exception& e) {
      res.status = RunStatus::Failed;
      res.error = e.what();
    }
  }
  return results;
}

std::vector<RunSpec> vary_initial_conditions(const FlowLaw& law, const std::vector<Vector>& x0s) {
  std::vector<RunSpec> out;
  out.reserve(x0s.size());
  for (std::size_t i = 0; i < x0s.size(); ++i)
    out.push_back({fmt::format("ic{}", i + 1), law, x0s[i]});
  return out;
}

std::vector<RunSpec> vary_parameter(const FlowLaw& law, const Vector& x0, const std::string& name,
                                    const std::vector<double>& values) {
  double FlowLaw::*field = nullptr;
  if (name == "rho") field = &FlowLaw::rho;
  else if (name == "alpha") field = &FlowLaw::alpha;
  else if (name == "lambda") field = &FlowLaw::lambda;
  else if (name == "beta") field = &FlowLaw::beta;
  else if (name == "delta") field = &FlowLaw::delta;
  else
    throw ConfigError(fmt::format(
        "cannot vary '{}' (expected rho, alpha, lambda, beta or delta)", name));

  std::vector<RunSpec> out;
  out.reserve(values.size());
  for (double v : values) {
    FlowLaw varied = law;
    varied.*field = v;
    out.push_back({fmt::format("{}_{}", name, v), varied, x0});
  }
  return out;
}

}  // namespace gradflow
