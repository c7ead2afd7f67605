#include "cavityduo/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cavityduo/error.hpp"
#include "cavityduo/spectrum_io.hpp"

namespace cavityduo::harness {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Scenario, std::string_view>, 6> kScenarioNames = {{
    {Scenario::EvolveCoherent, "evolve-coherent"},
    {Scenario::EvolveCat, "evolve-cat"},
    {Scenario::Sweep, "sweep"},
    {Scenario::Verify, "verify"},
    {Scenario::Coefficients, "coefficients"},
    {Scenario::AlgebraCheck, "algebra-check"},
}};

[[noreturn]] void parse_fail(const std::string& field, const std::string& msg) {
  throw Error(ErrorKind::ParseError, "field '" + field + "': " + msg);
}

std::string join(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

// Typed access to one JSON object with unknown-key detection.
class Object {
 public:
  Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) parse_fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(std::string_view key) {
    seen_.insert(std::string(key));
    return j_.contains(key);
  }

  const json& at(std::string_view key) {
    seen_.insert(std::string(key));
    if (!j_.contains(key)) parse_fail(join(path_, key), "missing");
    return j_.at(key);
  }

  std::string field(std::string_view key) const { return join(path_, key); }

  double number(std::string_view key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      parse_fail(field(key), "missing");
    }
    const json& v = j_.at(key);
    if (!v.is_number()) parse_fail(field(key), "expected a number");
    return v.get<double>();
  }

  std::size_t count(std::string_view key, std::optional<std::size_t> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      parse_fail(field(key), "missing");
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      parse_fail(field(key), "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  bool flag(std::string_view key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) parse_fail(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(std::string_view key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      parse_fail(field(key), "missing");
    }
    const json& v = j_.at(key);
    if (!v.is_string()) parse_fail(field(key), "expected a string");
    return v.get<std::string>();
  }

  /// A number, or [re, im].
  cplx complex(std::string_view key, std::optional<cplx> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      parse_fail(field(key), "missing");
    }
    const json& v = j_.at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    parse_fail(field(key), "expected a number or [re, im]");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      if (!seen_.count(key)) parse_fail(field(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_finite(double v, const std::string& name, std::vector<std::string>& problems) {
  if (!std::isfinite(v)) problems.push_back(name + " must be finite");
}

void require_positive(double v, const std::string& name, std::vector<std::string>& problems) {
  if (!(v > 0.0) || !std::isfinite(v)) problems.push_back(name + " must be positive");
}

// Collects the message of a ValidationError thrown by a module-level validate().
template <class F>
void collect(F&& check, std::vector<std::string>& problems) {
  try {
    check();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ValidationError) throw;
    std::string msg = e.what();
    const std::string prefix = "ValidationError: ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    problems.push_back(msg);
  }
}

std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string_view to_string(Scenario s) {
  for (const auto& [value, name] : kScenarioNames)
    if (value == s) return name;
  return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
  for (const auto& [value, n] : kScenarioNames)
    if (n == name) return value;
  throw Error(ErrorKind::ValidationError, "unknown scenario '" + std::string(name) + "'");
}

double SweepSpec::value(std::size_t i) const {
  if (steps <= 1) return start;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw Error(ErrorKind::ParseError, "override '" + std::string(assignment) + "' is not key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));

  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  if (value.is_object())
    throw Error(ErrorKind::ParseError, "override '" + key + "' must be a scalar or [re, im]");

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw Error(ErrorKind::ParseError, "override key '" + key + "' is malformed");
    if (!node->is_object())
      throw Error(ErrorKind::ParseError, "override key '" + key + "' does not name an object field");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

RunConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.source = doc;
  cfg.base_dir = base_dir;
  std::vector<std::string> problems;

  Object root(doc, "");
  cfg.scenario = scenario_from_string(root.text("scenario"));

  if (cfg.scenario != Scenario::AlgebraCheck || root.has("params")) {
    Object p(root.at("params"), "params");
    cfg.params.omega_a = p.number("omega_a");
    cfg.params.omega_b = p.number("omega_b");
    cfg.params.g = p.number("g", 0.0);
    p.finish();
    collect([&] { cfg.params.validate(); }, problems);
  }

  if (root.has("coeffs")) {
    Object c(root.at("coeffs"), "coeffs");
    LabCoefficients k;
    k.k_aa = c.number("k_aa", 0.0);
    k.k_ab = c.number("k_ab", 0.0);
    k.k_ba = c.number("k_ba", 0.0);
    k.k_bb = c.number("k_bb", 0.0);
    k.d_aa = c.number("d_aa", 0.0);
    k.d_ab = c.number("d_ab", 0.0);
    k.d_ba = c.number("d_ba", 0.0);
    k.d_bb = c.number("d_bb", 0.0);
    c.finish();
    collect([&] { k.validate(); }, problems);
    cfg.coeffs = k;
  }

  if (root.has("spectrum")) {
    Object s(root.at("spectrum"), "spectrum");
    SpectrumSource src;
    src.path = s.text("path");
    if (src.path.is_relative()) src.path = base_dir / src.path;
    src.tau_c = s.number("tau_c");
    src.rel_tol = s.number("rel_tol", 1e-6);
    s.finish();
    require_positive(src.tau_c, "spectrum.tau_c", problems);
    require_positive(src.rel_tol, "spectrum.rel_tol", problems);
    cfg.spectrum = src;
  }

  const bool needs_model = cfg.scenario != Scenario::AlgebraCheck;
  if (cfg.coeffs && cfg.spectrum)
    problems.emplace_back("coeffs and spectrum are mutually exclusive");
  if (needs_model && !cfg.coeffs && !cfg.spectrum)
    problems.emplace_back("one of coeffs or spectrum is required");

  if (root.has("initial")) {
    const json& init = root.at("initial");
    Object i(init, "initial");
    const bool is_cat = init.is_object() && (init.contains("w") || init.contains("phi"));
    const bool is_coherent = init.is_object() && (init.contains("v_a") || init.contains("v_b"));
    if (is_cat && is_coherent) {
      problems.emplace_back("initial must hold either v_a/v_b or w/phi, not both");
    } else if (is_cat) {
      CatState cat{i.complex("w"), i.number("phi", 0.0)};
      try {
        cat.validate();
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ValidationError) problems.emplace_back(e.what());
        else throw;
      }
      cfg.cat = cat;
    } else {
      cfg.coherent = CoherentPair{i.complex("v_a", cplx{}), i.complex("v_b", cplx{})};
      require_finite(std::abs(cfg.coherent->v_a), "initial.v_a", problems);
      require_finite(std::abs(cfg.coherent->v_b), "initial.v_b", problems);
    }
    i.finish();
  }
  const bool needs_state = cfg.scenario == Scenario::EvolveCoherent ||
                           cfg.scenario == Scenario::EvolveCat ||
                           cfg.scenario == Scenario::Sweep || cfg.scenario == Scenario::Verify;
  if (needs_state && !cfg.coherent && !cfg.cat) problems.emplace_back("initial state is required");
  if (cfg.scenario == Scenario::EvolveCoherent && cfg.cat)
    problems.emplace_back("evolve-coherent needs initial.v_a / initial.v_b, got a cat state");
  if (cfg.scenario == Scenario::EvolveCat && cfg.coherent)
    problems.emplace_back("evolve-cat needs initial.w, got a coherent pair");

  cfg.t_max = root.number("t_max", cfg.t_max);
  cfg.dt = root.number("dt", cfg.dt);
  cfg.sample_every = root.count("sample_every", cfg.sample_every);
  if (root.has("cutoff")) {
    const json& cut = root.at("cutoff");
    if (cut.is_number_integer()) {
      cfg.dim_a = cfg.dim_b = root.count("cutoff");
    } else {
      Object c(cut, "cutoff");
      cfg.dim_a = c.count("dim_a");
      cfg.dim_b = c.count("dim_b");
      c.finish();
    }
  }
  cfg.oracle = root.flag("oracle", cfg.oracle);
  cfg.allow_large_step = root.flag("allow_large_step", cfg.allow_large_step);
  cfg.trials = root.count("trials", cfg.trials);

  require_positive(cfg.t_max, "t_max", problems);
  require_positive(cfg.dt, "dt", problems);
  if (cfg.sample_every == 0) problems.emplace_back("sample_every must be at least 1");
  if (cfg.dim_a < 2 || cfg.dim_b < 2) problems.emplace_back("cutoff must be at least 2 per mode");
  if (cfg.trials == 0) problems.emplace_back("trials must be at least 1");
  if (cfg.scenario == Scenario::Verify && !cfg.oracle)
    problems.emplace_back("verify compares against the oracle; oracle must be true");
  if (cfg.scenario == Scenario::AlgebraCheck && cfg.dim_a != cfg.dim_b)
    problems.emplace_back("algebra-check uses a single cutoff; dim_a and dim_b must agree");

  if (root.has("sweep")) {
    Object s(root.at("sweep"), "sweep");
    SweepSpec sw;
    sw.parameter = s.text("parameter");
    sw.start = s.number("start");
    sw.stop = s.number("stop");
    sw.steps = s.count("steps");
    s.finish();
    require_finite(sw.start, "sweep.start", problems);
    require_finite(sw.stop, "sweep.stop", problems);
    if (sw.steps == 0) problems.emplace_back("sweep.steps must be at least 1");
    if (sw.parameter.empty() || sw.parameter.rfind("sweep", 0) == 0)
      problems.emplace_back("sweep.parameter must name a config field outside sweep");
    cfg.sweep = sw;
  }
  if (cfg.scenario == Scenario::Sweep && !cfg.sweep)
    problems.emplace_back("scenario sweep requires a sweep descriptor");
  if (cfg.scenario != Scenario::Sweep && cfg.sweep)
    problems.emplace_back("sweep descriptor is only allowed with scenario sweep");

  if (root.has("tolerances")) {
    Object t(root.at("tolerances"), "tolerances");
    Tolerances& tol = cfg.tolerances;
    tol.amplitude = t.number("amplitude", tol.amplitude);
    tol.delta = t.number("delta", tol.delta);
    tol.trace_distance = t.number("trace_distance", tol.trace_distance);
    tol.trace_drift = t.number("trace_drift", tol.trace_drift);
    tol.hermiticity = t.number("hermiticity", tol.hermiticity);
    tol.min_eig = t.number("min_eig", tol.min_eig);
    tol.excitation_growth = t.number("excitation_growth", tol.excitation_growth);
    t.finish();
  }

  if (root.has("output")) {
    cfg.output = root.text("output");
    if (cfg.output.is_relative()) cfg.output = base_dir / cfg.output;
  }
  if (root.has("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned()) parse_fail("seed", "expected a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  root.finish();

  if (!problems.empty()) {
    std::ostringstream os;
    for (std::size_t i = 0; i < problems.size(); ++i) os << (i ? "; " : "") << problems[i];
    throw Error(ErrorKind::ValidationError, os.str());
  }

  if (cfg.coeffs) {
    cfg.resolved = *cfg.coeffs;
  } else if (cfg.spectrum) {
    const ReservoirSpectrum spec = read_spectrum_csv(cfg.spectrum->path.string(), cfg.spectrum->tau_c);
    QuadratureOptions opt;
    opt.rel_tol = cfg.spectrum->rel_tol;
    const QuadratureResult q = coefficients_from_spectrum(spec, normal_modes(cfg.params), opt);
    cfg.resolved = q.coeffs;
    cfg.quadrature_change = q.max_refinement_change;
  }
  if (needs_model) cfg.warnings = physicality_warnings(cfg.resolved);
  return cfg;
}

RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw Error(ErrorKind::ParseError, location(text, e.byte) + ": " + msg);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return config_from_json(doc, base_dir);
}

RunConfig parse_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path(), overrides);
}

}  // namespace cavityduo::harness
