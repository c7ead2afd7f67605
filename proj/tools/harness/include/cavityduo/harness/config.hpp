#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cavityduo/coefficients.hpp"
#include "cavityduo/states.hpp"
#include "json.hpp"

namespace cavityduo::harness {

enum class Scenario { EvolveCoherent, EvolveCat, Sweep, Verify, Coefficients, AlgebraCheck };

std::string_view to_string(Scenario s);
/// Throws ValidationError for unknown names.
Scenario scenario_from_string(std::string_view name);

struct SpectrumSource {
  std::filesystem::path path;
  double tau_c = 0.0;
  double rel_tol = 1e-6;
};

/// Sweeps one numeric config field, addressed by its dotted key (e.g. "params.g").
struct SweepSpec {
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 2;

  double value(std::size_t i) const;
};

struct Tolerances {
  double amplitude = 1e-6;
  double delta = 1e-5;
  double trace_distance = 1e-5;
  double trace_drift = 1e-9;
  double hermiticity = 1e-10;
  double min_eig = -1e-7;
  /// Allowed growth of <a+a + b+b> between consecutive samples.
  double excitation_growth = 1e-9;
};

struct RunConfig {
  Scenario scenario = Scenario::EvolveCoherent;
  ModelParams params;
  std::optional<LabCoefficients> coeffs;
  std::optional<SpectrumSource> spectrum;

  /// Exactly one of these is set for scenarios that evolve a state.
  std::optional<CoherentPair> coherent;
  std::optional<CatState> cat;

  double t_max = 10.0;
  double dt = 1e-3;
  std::size_t sample_every = 100;
  std::size_t dim_a = 15;
  std::size_t dim_b = 15;
  bool oracle = true;
  bool allow_large_step = false;
  std::size_t trials = 20;  // algebra-check

  std::optional<SweepSpec> sweep;
  Tolerances tolerances;
  std::filesystem::path output = ".";
  std::uint64_t seed = 0;

  /// Direct coefficients, or the spectrum quadrature result.
  LabCoefficients resolved;
  /// Grid-refinement change of the quadrature (0 for direct coefficients).
  double quadrature_change = 0.0;
  /// Gamma-matrix screen results for the resolved coefficients.
  std::vector<std::string> warnings;
  /// Config as read (after overrides) and the directory relative paths
  /// resolve against; used to derive sweep points.
  nlohmann::json source;
  std::filesystem::path base_dir;
};

/// Applies `key=value` to a config document. The key is a dotted path; the
/// value is parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// Validates the document against the schema and builds the config.
/// Relative file paths are resolved against base_dir, and a spectrum file is
/// integrated right away. Throws ParseError for type/shape problems and
/// ValidationError listing every violated invariant.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});
RunConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                            const std::vector<std::string>& overrides = {});

}  // namespace cavityduo::harness
