#pragma once

// Experiment drivers behind the `ravflow` command line tool.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <ostream>
#include <vector>

#include "ravflow/config.hpp"
#include "ravflow/diagnostics.hpp"
#include "ravflow/errors.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

/// Initial field(s) for cfg.init. Random inits draw one uniform [-1, 1)
/// sample per grid point (row-major) from Xorshift64Star(cfg.seed), subtract
/// the sample mean, then scale and offset.
std::vector<Field> build_initial(const RunConfig& cfg);

/// Model for cfg; the vesicle targets are taken from `initial`.
ModelPtr build_model(const RunConfig& cfg, const std::vector<Field>& initial);

struct RunResult {
  std::vector<StepRecord> records;  // n = 0 first
  std::vector<Field> final_fields;
  double max_abs_r = 0.0;      // RAV runs
  double max_sav_drift = 0.0;  // SAV runs
  long zeroed = 0;   // steps with Q >= 0
  long carried = 0;  // steps with Q < 0
};

struct RunOutput {
  bool write_files = true;
};

/// Runs cfg.scheme from the initial condition to t_end with step cfg.dt.
/// With write_files, writes series.csv, summary.txt and RAVF snapshots to
/// cfg.output_dir.
RunResult simulate(const RunConfig& cfg, const RunOutput& out = {});

/// Exit codes of the command line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

/// Runs `f`, printing any error to `err` and mapping it to an exit code.
template <typename F>
int guarded(std::ostream& err, F&& f) {
  try {
    f();
    return kExitOk;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidFieldError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_run(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_converge(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int cmd_compare(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Harness parallelism: RAVFLOW_THREADS if set and positive, else the
/// hardware concurrency.
int harness_threads();

}  // namespace ravflow
