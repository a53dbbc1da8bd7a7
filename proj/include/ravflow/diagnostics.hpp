#pragma once

// Per-step observables, error norms, convergence tables and their CSV form.
//
// Time-series CSV:  n,t,E,E_mod,r,Q_minus_rn,xi,mass_0[,mass_1][,VD,SAD][,sav_drift]
// Convergence CSV:  dt,err_L2,order_L2,err_Linf,order_Linf,max_abs_r
// Values are printed with %.17g so that reading them back is exact. Lines
// starting with '#' are comments (the seed goes there).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ravflow/grid.hpp"
#include "ravflow/models.hpp"
#include "ravflow/rav.hpp"
#include "ravflow/sav.hpp"

namespace ravflow {

struct StepRecord {
  long n = 0;
  double t = 0.0;
  double E = 0.0;
  double E_mod = 0.0;
  double r = 0.0;
  double Q_minus_rn = 0.0;
  double xi = 1.0;
  std::vector<double> mass;                           // mean of each field
  std::vector<std::pair<std::string, double>> extra;  // VD, SAD, sav_drift
};

/// Column set of a time-series file.
struct SeriesLayout {
  std::size_t n_fields = 1;
  std::vector<std::string> extra;

  std::vector<std::string> columns() const;
};

/// Layout produced by record() / record_sav() for this model.
SeriesLayout series_layout(const Model& model, bool sav);

/// Record of an RAV state. `report` is empty for the initial state.
StepRecord record(const RavState& state, const std::optional<StepReport>& report,
                  const Model& model);

/// Record of an SAV state: r is the SAV scalar, E_mod the SAV modified
/// energy 1/2 (phi, L phi) + r^2 - C0, plus a sav_drift column.
StepRecord record_sav(const SavState& state, const Model& model);

struct ErrorNorms {
  double l2;
  double linf;
};

/// L2 = sqrt(inner(d, d)), Linf = max |d| with d = numeric - reference.
ErrorNorms error_norms(const Field& numeric, const Field& reference);

struct ConvergenceInput {
  double dt;
  double err_l2;
  double err_linf;
  double max_abs_r;
};

struct ConvergenceRow {
  double dt;
  double err_l2;
  std::optional<double> order_l2;
  double err_linf;
  std::optional<double> order_linf;
  double max_abs_r;
};

/// order_i = log2(err_{i-1} / err_i). Throws UnsupportedOperation unless each
/// dt is half the previous one.
std::vector<ConvergenceRow> convergence_rates(const std::vector<ConvergenceInput>& runs);

/// Console table with orders rounded to two decimals.
std::string format_convergence_table(const std::vector<ConvergenceRow>& rows);

void write_csv(const std::filesystem::path& path, const SeriesLayout& layout,
               const std::vector<StepRecord>& records, std::optional<std::uint64_t> seed = {});
void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows,
                           std::optional<std::uint64_t> seed = {});

/// Parsed CSV: header names and numeric rows (empty cells read as NaN).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ravflow
