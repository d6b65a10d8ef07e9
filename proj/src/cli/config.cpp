#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "gradflow/cli.hpp"
#include "gradflow/error.hpp"

namespace gradflow::cli {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where));
  for (const auto& item : obj.items())
    if (!allowed.contains(item.key()))
      throw ConfigError(fmt::format("unknown key '{}' in '{}'", item.key(), where));
}

double number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(fmt::format("missing '{}.{}'", where, key));
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(fmt::format("'{}.{}' must be a number", where, key));
  return v.get<double>();
}

std::optional<double> maybe_number(const json& obj, const std::string& where,
                                   const std::string& key) {
  if (!obj.contains(key)) return std::nullopt;
  return number(obj, where, key);
}

Vector vector_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw ConfigError(fmt::format("'{}' must be a non-empty array of numbers", where));
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(fmt::format("'{}[{}]' must be a number", where, i));
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

std::vector<Vector> vectors_from(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty())
    throw ConfigError(fmt::format("'{}' must be a non-empty array of vectors", where));
  std::vector<Vector> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(vector_from(v[i], fmt::format("{}[{}]", where, i)));
  return out;
}

ProblemConfig parse_problem(const json& j) {
  check_keys(j, "problem", {"name", "matrix", "dimension", "lipschitz", "strong_convexity"});
  if (!j.contains("name") || !j.at("name").is_string())
    throw ConfigError("'problem.name' must be a string");
  ProblemConfig p;
  p.name = j.at("name").get<std::string>();
  p.lipschitz = maybe_number(j, "problem", "lipschitz");
  p.strong_convexity = maybe_number(j, "problem", "strong_convexity");
  if (p.name == "quadratic") {
    if (!j.contains("matrix")) throw ConfigError("missing 'problem.matrix'");
    const auto rows = vectors_from(j.at("matrix"), "problem.matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    p.matrix.resize(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (rows[static_cast<std::size_t>(r)].size() != n)
        throw ConfigError("'problem.matrix' must be square");
      p.matrix.row(r) = rows[static_cast<std::size_t>(r)].transpose();
    }
    p.dimension = n;
    if (j.contains("dimension") && number(j, "problem", "dimension") != static_cast<double>(n))
      throw ConfigError("'problem.dimension' disagrees with the matrix size");
  } else if (p.name == "zakharov") {
    const double n = number(j, "problem", "dimension");
    if (!(n >= 1.0) || n != std::floor(n))
      throw ConfigError("'problem.dimension' must be a positive integer");
    p.dimension = static_cast<Eigen::Index>(n);
  } else {
    throw ConfigError(
        fmt::format("unknown problem '{}' (expected quadratic or zakharov)", p.name));
  }
  return p;
}

FlowLaw parse_flow(const json& j) {
  check_keys(j, "flow", {"variant", "rho", "alpha", "lambda", "beta", "delta"});
  if (!j.contains("variant") || !j.at("variant").is_string())
    throw ConfigError("'flow.variant' must be a string");
  FlowLaw law;
  law.variant = parse_variant(j.at("variant").get<std::string>());
  law.rho = number(j, "flow", "rho");
  law.alpha = number(j, "flow", "alpha");
  law.delta = maybe_number(j, "flow", "delta").value_or(0.01);
  law.lambda = maybe_number(j, "flow", "lambda").value_or(0.0);
  if (law.variant == FlowVariant::FixedTimeFractional) law.beta = number(j, "flow", "beta");
  try {
    law.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return law;
}

SimOptions parse_sim(const json& j) {
  check_keys(j, "sim", {"step", "horizon", "eps_x", "eps_g", "record_stride"});
  SimOptions s;
  s.step = maybe_number(j, "sim", "step").value_or(s.step);
  s.horizon = maybe_number(j, "sim", "horizon").value_or(s.horizon);
  s.eps_x = maybe_number(j, "sim", "eps_x").value_or(s.eps_x);
  s.eps_g = maybe_number(j, "sim", "eps_g").value_or(s.eps_g);
  if (const auto stride = maybe_number(j, "sim", "record_stride")) {
    if (!(*stride >= 1.0) || *stride != std::floor(*stride))
      throw ConfigError("'sim.record_stride' must be a positive integer");
    s.record_stride = static_cast<std::size_t>(*stride);
  }
  return s;
}

VariationConfig parse_variations(const json& j) {
  check_keys(j, "variations", {"initial_conditions", "parameter", "values"});
  VariationConfig v;
  if (j.contains("initial_conditions")) {
    if (j.contains("parameter") || j.contains("values"))
      throw ConfigError("'variations' takes either initial_conditions or parameter/values");
    v.kind = VariationConfig::Kind::InitialConditions;
    v.initial_conditions = vectors_from(j.at("initial_conditions"), "variations.initial_conditions");
    return v;
  }
  if (!j.contains("parameter") || !j.at("parameter").is_string())
    throw ConfigError("'variations.parameter' must be a string");
  v.kind = VariationConfig::Kind::Parameter;
  v.parameter = j.at("parameter").get<std::string>();
  const Vector values = vector_from(j.contains("values") ? j.at("values") : json(),
                                    "variations.values");
  v.values.assign(values.data(), values.data() + values.size());
  return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  check_keys(j, "config",
             {"schema_version", "problem", "flow", "initial_condition", "initial_conditions",
              "sim", "output", "variations"});

  ExperimentConfig cfg;
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer())
    throw ConfigError("'schema_version' must be an integer");
  cfg.schema_version = j.at("schema_version").get<int>();
  if (cfg.schema_version != kSchemaVersion)
    throw ConfigError(fmt::format("unsupported schema_version {} (this build reads {})",
                                  cfg.schema_version, kSchemaVersion));

  if (!j.contains("problem")) throw ConfigError("missing 'problem'");
  if (!j.contains("flow")) throw ConfigError("missing 'flow'");
  cfg.problem = parse_problem(j.at("problem"));
  cfg.flow = parse_flow(j.at("flow"));

  if (j.contains("initial_condition") && j.contains("initial_conditions"))
    throw ConfigError("give either 'initial_condition' or 'initial_conditions', not both");
  if (j.contains("initial_condition"))
    cfg.initial_conditions.push_back(vector_from(j.at("initial_condition"), "initial_condition"));
  else if (j.contains("initial_conditions"))
    cfg.initial_conditions = vectors_from(j.at("initial_conditions"), "initial_conditions");

  if (j.contains("sim")) cfg.sim = parse_sim(j.at("sim"));
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"prefix"});
    if (o.contains("prefix")) {
      if (!o.at("prefix").is_string() || o.at("prefix").get<std::string>().empty())
        throw ConfigError("'output.prefix' must be a non-empty string");
      cfg.prefix = sanitize_label(o.at("prefix").get<std::string>());
    }
  }
  if (j.contains("variations")) cfg.variations = parse_variations(j.at("variations"));

  auto check_dim = [&](const Vector& x, const std::string& where) {
    if (x.size() != cfg.problem.dimension)
      throw ConfigError(fmt::format("'{}' has size {}, problem dimension is {}", where, x.size(),
                                    cfg.problem.dimension));
  };
  for (const auto& x : cfg.initial_conditions) check_dim(x, "initial condition");
  for (const auto& x : cfg.variations.initial_conditions) check_dim(x, "variations.initial_conditions");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Problem build_problem(const ProblemConfig& cfg) {
  try {
    Problem p = cfg.name == "quadratic" ? quadratic_problem(cfg.matrix)
                                        : zakharov_problem(cfg.dimension);
    if (cfg.lipschitz || cfg.strong_convexity) {
      const auto lip = cfg.lipschitz ? cfg.lipschitz : p.lipschitz();
      const auto mu = cfg.strong_convexity ? cfg.strong_convexity : p.strong_convexity();
      p = p.with_constants(lip, mu, p.curvature_scale());
    }
    return p;
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::string sanitize_label(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

}  // namespace gradflow::cli
