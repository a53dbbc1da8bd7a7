#include "ravflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ravflow/errors.hpp"
#include "ravflow/kernels.hpp"

namespace ravflow {

namespace {

bool is_vesicle(const Model& model) { return model.name() == "vesicle"; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> masses(const std::vector<Field>& fields) {
  std::vector<double> m;
  for (const Field& f : fields) m.push_back(mean(f));
  return m;
}

void add_vesicle_extras(StepRecord& rec, const Model& model, const Field& phi) {
  const VesicleTargets t = vesicle_targets(model);
  rec.extra.emplace_back("VD", vesicle_volume(model, phi) - t.volume);
  rec.extra.emplace_back("SAD", vesicle_area(model, phi) - t.area);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<std::string> SeriesLayout::columns() const {
  std::vector<std::string> c{"n", "t", "E", "E_mod", "r", "Q_minus_rn", "xi"};
  for (std::size_t i = 0; i < n_fields; ++i) c.push_back("mass_" + std::to_string(i));
  c.insert(c.end(), extra.begin(), extra.end());
  return c;
}

SeriesLayout series_layout(const Model& model, bool sav) {
  SeriesLayout l{model.n_fields(), {}};
  if (is_vesicle(model)) l.extra = {"VD", "SAD"};
  if (sav) l.extra.push_back("sav_drift");
  return l;
}

StepRecord record(const RavState& state, const std::optional<StepReport>& report,
                  const Model& model) {
  StepRecord rec;
  rec.n = state.n;
  rec.t = state.t;
  rec.E = state.E;
  rec.r = state.r;
  rec.E_mod = state.E + state.r;
  rec.Q_minus_rn = report ? report->q_minus_rn : 0.0;
  rec.xi = state.xi;
  rec.mass = masses(state.phi);
  if (is_vesicle(model)) add_vesicle_extras(rec, model, state.phi[0]);
  return rec;
}

StepRecord record_sav(const SavState& state, const Model& model) {
  StepRecord rec;
  rec.n = state.n;
  rec.t = state.t;
  const Field f[] = {state.phi};
  rec.E = energy(model, f);
  rec.r = state.r;
  rec.E_mod = sav_modified_energy(state, model);
  rec.Q_minus_rn = 0.0;
  rec.xi = 1.0;
  rec.mass = {mean(state.phi)};
  if (is_vesicle(model)) add_vesicle_extras(rec, model, state.phi);
  rec.extra.emplace_back("sav_drift", sav_drift(state, model));
  return rec;
}

ErrorNorms error_norms(const Field& numeric, const Field& reference) {
  require_same_grid(numeric, reference);
  const Field d = numeric - reference;
  double linf = 0.0;
  for (double v : d.values()) linf = std::max(linf, std::abs(v));
  return {std::sqrt(inner(d, d)), linf};
}

std::vector<ConvergenceRow> convergence_rates(const std::vector<ConvergenceInput>& runs) {
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ConvergenceInput& c = runs[i];
    ConvergenceRow row{c.dt, c.err_l2, std::nullopt, c.err_linf, std::nullopt, c.max_abs_r};
    if (i > 0) {
      const ConvergenceInput& p = runs[i - 1];
      if (std::abs(p.dt / c.dt - 2.0) > 1e-9) {
        throw UnsupportedOperation("convergence orders need dt halved at every row");
      }
      row.order_l2 = std::log2(p.err_l2 / c.err_l2);
      row.order_linf = std::log2(p.err_linf / c.err_linf);
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_convergence_table(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-11s %-6s %-11s %-6s %s\n", "dt", "L2-error", "order",
                "Linf-error", "order", "max|r|");
  os << line;
  auto order = [](const std::optional<double>& o) {
    char b[16];
    if (o) {
      std::snprintf(b, sizeof b, "%.2f", *o);
    } else {
      b[0] = '\0';
    }
    return std::string(b);
  };
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10.4g %-11.4e %-6s %-11.4e %-6s %.1f\n", r.dt, r.err_l2,
                  order(r.order_l2).c_str(), r.err_linf, order(r.order_linf).c_str(),
                  r.max_abs_r);
    os << line;
  }
  return os.str();
}

void write_csv(const std::filesystem::path& path, const SeriesLayout& layout,
               const std::vector<StepRecord>& records, std::optional<std::uint64_t> seed) {
  std::ofstream os = open_for_write(path);
  if (seed) os << "# seed=" << *seed << '\n';
  const auto cols = layout.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  long last_n = std::numeric_limits<long>::min();
  for (const StepRecord& r : records) {
    if (r.mass.size() != layout.n_fields || r.extra.size() != layout.extra.size()) {
      throw InvalidFieldError("record does not match the CSV layout");
    }
    if (r.n <= last_n) throw InvalidFieldError("records must be strictly increasing in n");
    last_n = r.n;
    os << r.n << ',' << fmt(r.t) << ',' << fmt(r.E) << ',' << fmt(r.E_mod) << ',' << fmt(r.r)
       << ',' << fmt(r.Q_minus_rn) << ',' << fmt(r.xi);
    for (double m : r.mass) os << ',' << fmt(m);
    for (std::size_t i = 0; i < r.extra.size(); ++i) {
      if (r.extra[i].first != layout.extra[i]) {
        throw InvalidFieldError("record column " + r.extra[i].first + " out of place");
      }
      os << ',' << fmt(r.extra[i].second);
    }
    os << '\n';
  }
  finish(os, path);
}

void write_convergence_csv(const std::filesystem::path& path,
                           const std::vector<ConvergenceRow>& rows,
                           std::optional<std::uint64_t> seed) {
  std::ofstream os = open_for_write(path);
  if (seed) os << "# seed=" << *seed << '\n';
  os << "dt,err_L2,order_L2,err_Linf,order_Linf,max_abs_r\n";
  auto opt = [](const std::optional<double>& o) { return o ? fmt(*o) : std::string(); };
  for (const auto& r : rows) {
    os << fmt(r.dt) << ',' << fmt(r.err_l2) << ',' << opt(r.order_l2) << ',' << fmt(r.err_linf)
       << ',' << opt(r.order_linf) << ',' << fmt(r.max_abs_r) << '\n';
  }
  finish(os, path);
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("CSV has no column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.substr(1));
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw IoError("ragged row in " + path.string() + ": " + line);
    }
    std::vector<double> row;
    for (const std::string& c : cells) {
      if (c.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') throw IoError("bad number '" + c + "' in " + path.string());
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw IoError("empty CSV " + path.string());
  return t;
}

}  // namespace ravflow
