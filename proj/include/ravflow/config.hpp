#pragma once

// Experiment configuration. Files are a small TOML subset:
//
//   # comment
//   [section]
//   key = 1.5e-3          # numbers
//   key = "text"          # strings
//   key = true            # booleans
//   key = [0.5, 0.25]     # flat numeric arrays
//
// Sections are [grid], [time], [model] and [output]; unknown sections or
// keys, and keys a model does not use, are rejected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ravflow {

enum class ModelKind { CahnHilliard, Pfc, Vesicle, Surfactant };
enum class SchemeKind { RavCn, RavBdf3, RavBdf4, Sav1, SavCn };
enum class InitKind { SineCh, SinePfc, RandomOffset, TanhEllipse, RandomTwoField };

std::string_view to_string(ModelKind m);
std::string_view to_string(SchemeKind s);
std::string_view to_string(InitKind i);

struct RunConfig {
  ModelKind model = ModelKind::CahnHilliard;
  SchemeKind scheme = SchemeKind::RavCn;
  InitKind init = InitKind::SineCh;

  int nx = 64;
  int ny = 64;
  double lx = 6.283185307179586;  // 2 pi
  double ly = 6.283185307179586;

  double dt = 0.0;
  double t_end = 0.0;
  std::vector<double> dt_list;    // converge / compare; dt defaults to its first entry
  std::optional<double> dt_ref;   // converge

  double lambda_stab = 2.0;
  double c0 = 1.0;
  std::optional<bool> dealias;    // unset = model default
  std::uint64_t seed = 1;

  // Model parameters; only the ones the model uses may be set.
  std::map<std::string, double> model_params;

  std::filesystem::path output_dir = "out";
  long snapshot_every = 0;  // 0 = final snapshot only
};

/// Parses and validates a configuration. Throws ConfigError with the line
/// number on malformed input.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Checks invariants (dt > 0, t_end >= dt, scheme/model compatibility, ...).
void validate(const RunConfig& cfg);

/// Model parameter with its documented default.
double model_param(const RunConfig& cfg, const std::string& key);

/// Whether `scheme` is defined for `model`.
bool compatible(ModelKind model, SchemeKind scheme);

}  // namespace ravflow
