#include "ravflow/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include "ravflow/rav.hpp"
#include "ravflow/rng.hpp"
#include "ravflow/sav.hpp"
#include "ravflow/snapshot.hpp"

namespace ravflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

Grid2D grid_of(const RunConfig& cfg) { return Grid2D(cfg.nx, cfg.ny, cfg.lx, cfg.ly); }

// Zero-mean uniform noise: one draw per grid point, mean removed.
Field centred_noise(const Grid2D& grid, Xorshift64Star& rng) {
  Field f(grid);
  double sum = 0.0;
  for (double& v : f.values()) {
    v = rng.uniform();
    sum += v;
  }
  const double m = sum / static_cast<double>(f.size());
  for (double& v : f.values()) v -= m;
  return f;
}

Field offset_scaled(const Field& noise, double offset, double amplitude) {
  Field f(noise.grid());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = offset + amplitude * noise[k];
  return f;
}

long step_count(double t_end, double dt) { return std::lround(t_end / dt); }

std::string padded(long n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06ld", n);
  return buf;
}

std::string label(double dt) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "dt_%g", dt);
  return buf;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

class OutputWriter {
 public:
  OutputWriter(const RunConfig& cfg, const Model& model, bool enabled)
      : cfg_(cfg), model_(model), enabled_(enabled) {
    if (enabled_) ensure_dir(cfg_.output_dir);
  }

  void snapshot(long n, double t, const std::vector<Field>& fields, bool final_state) {
    if (!enabled_) return;
    const bool periodic = cfg_.snapshot_every > 0 && n % cfg_.snapshot_every == 0;
    if (!periodic && !final_state && n != 0) return;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string name = model_.field_operator(i).name;
      write_snapshot(cfg_.output_dir / (name + "_" + padded(n) + ".ravf"), fields[i], t);
      if (final_state) write_snapshot(cfg_.output_dir / (name + "_final.ravf"), fields[i], t);
    }
  }

  void finish(const RunResult& res, bool sav) {
    if (!enabled_) return;
    write_csv(cfg_.output_dir / "series.csv", series_layout(model_, sav), res.records, cfg_.seed);
    const std::filesystem::path path = cfg_.output_dir / "summary.txt";
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    const StepRecord& last = res.records.back();
    char buf[64];
    auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
    };
    os << "model = " << to_string(cfg_.model) << '\n'
       << "scheme = " << to_string(cfg_.scheme) << '\n'
       << "seed = " << cfg_.seed << '\n'
       << "dt = " << num(cfg_.dt) << '\n'
       << "steps = " << last.n << '\n'
       << "t_final = " << num(last.t) << '\n'
       << "E_final = " << num(last.E) << '\n'
       << "E_mod_final = " << num(last.E_mod) << '\n';
    if (sav) {
      os << "max_sav_drift = " << num(res.max_sav_drift) << '\n';
    } else {
      os << "max_abs_r = " << num(res.max_abs_r) << '\n'
         << "steps_zeroed = " << res.zeroed << '\n'
         << "steps_carried = " << res.carried << '\n';
    }
    if (!os) throw IoError("failed writing " + path.string());
  }

 private:
  const RunConfig& cfg_;
  const Model& model_;
  bool enabled_;
};

// Record of a BDF start value, which has no step report of its own.
StepRecord record_entry(long n, double t, const RavHistoryEntry& e, const Model& model) {
  RavState s;
  s.n = n;
  s.t = t;
  s.phi = e.phi;
  s.phibar = e.phibar;
  s.r = e.r;
  s.E = e.E;
  s.xi = (e.E + model.c0() + e.r) / (e.E + model.c0());
  return record(s, std::nullopt, model);
}

RunResult run_rav(const RunConfig& cfg, const Model& model, std::vector<Field> init,
                  OutputWriter& out) {
  RunResult res;
  const long steps = step_count(cfg.t_end, cfg.dt);
  RavState state = initial_state(model, std::move(init));
  res.records.push_back(record(state, std::nullopt, model));

  auto account = [&](const StepResult& step) {
    res.records.push_back(record(step.state, step.report, model));
    res.max_abs_r = std::max(res.max_abs_r, std::abs(step.state.r));
    (step.report.branch == Branch::Zeroed ? res.zeroed : res.carried) += 1;
  };

  const double t_start = state.t;
  long done = 0;
  const bool bdf = cfg.scheme == SchemeKind::RavBdf3 || cfg.scheme == SchemeKind::RavBdf4;
  const int k = cfg.scheme == SchemeKind::RavBdf4 ? 4 : 3;
  out.snapshot(0, state.t, state.phi, steps == 0);
  if (bdf) {
    if (steps < k - 1) throw ConfigError("t_end is shorter than the BDF start-up");
    const double t0 = t_start;
    state = startup_bdf(k, state, model, cfg.dt);
    // history[k-2] is the initial state, already recorded.
    for (long j = 1; j < k - 1; ++j) {
      const auto& e = state.history[static_cast<std::size_t>(k - 2 - j)];
      res.records.push_back(record_entry(j, t0 + j * cfg.dt, e, model));
      res.max_abs_r = std::max(res.max_abs_r, std::abs(e.r));
      out.snapshot(j, t0 + j * cfg.dt, e.phi, false);
    }
    res.records.push_back(record(state, std::nullopt, model));
    res.max_abs_r = std::max(res.max_abs_r, std::abs(state.r));
    done = k - 1;
    out.snapshot(done, state.t, state.phi, done == steps);
  }
  for (long n = done + 1; n <= steps; ++n) {
    StepResult step = bdf                ? step_bdf(k, state, model, cfg.dt)
                      : n == 1           ? first_step(state, model, cfg.dt)
                      : model.n_fields() > 1 ? step_multi(state, model, cfg.dt)
                                             : step_cn(state, model, cfg.dt);
    step.state.t = t_start + static_cast<double>(n) * cfg.dt;
    account(step);
    state = std::move(step.state);
    out.snapshot(n, state.t, state.phi, n == steps);
  }
  res.final_fields = std::move(state.phi);
  return res;
}

RunResult run_sav(const RunConfig& cfg, const Model& model, std::vector<Field> init,
                  OutputWriter& out) {
  RunResult res;
  const long steps = step_count(cfg.t_end, cfg.dt);
  SavState state = sav_init(model, std::move(init.at(0)));
  res.records.push_back(record_sav(state, model));
  out.snapshot(0, state.t, {state.phi}, steps == 0);
  for (long n = 1; n <= steps; ++n) {
    const bool first_order = cfg.scheme == SchemeKind::Sav1 || n == 1;
    SavStepResult step = first_order ? sav_step_first_order(state, model, cfg.dt)
                                     : sav_step_cn(state, model, cfg.dt);
    state = std::move(step.state);
    state.t = static_cast<double>(n) * cfg.dt;
    res.records.push_back(record_sav(state, model));
    res.max_sav_drift = std::max(res.max_sav_drift, res.records.back().extra.back().second);
    out.snapshot(n, state.t, {state.phi}, n == steps);
  }
  res.final_fields = {std::move(state.phi)};
  return res;
}

bool is_sav(SchemeKind s) { return s == SchemeKind::Sav1 || s == SchemeKind::SavCn; }

// Runs `jobs` on up to `workers` threads; each worker gets its own OpenMP
// team size so that the total stays within the harness budget.
template <typename Job>
void run_parallel(std::size_t count, Job&& job) {
  const int budget = harness_threads();
  const auto workers = static_cast<std::size_t>(
      std::max(1, std::min<int>(budget, static_cast<int>(count))));
  const int omp_per_worker = std::max(1, budget / static_cast<int>(workers));
  std::mutex mutex;
  std::size_t next = 0;
  std::exception_ptr error;
  auto worker = [&] {
    omp_set_num_threads(omp_per_worker);
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mutex);
        if (next >= count || error) return;
        i = next++;
      }
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<Field> build_initial(const RunConfig& cfg) {
  validate(cfg);
  const Grid2D grid = grid_of(cfg);
  Xorshift64Star rng(cfg.seed);
  switch (cfg.init) {
    case InitKind::SineCh:
      return {Field::sample(grid, [](double x, double y) {
        return 0.05 * std::sin(x) * std::sin(y);
      })};
    case InitKind::SinePfc:
      return {Field::sample(grid, [](double x, double y) {
        return std::sin(kPi * x / 4.0) * std::sin(kPi * y / 4.0);
      })};
    case InitKind::RandomOffset:
      return {offset_scaled(centred_noise(grid, rng), 0.1, 0.1)};
    case InitKind::TanhEllipse: {
      const double eps = model_param(cfg, "epsilon");
      const double cx = 0.5 * cfg.lx;
      const double cy = 0.5 * cfg.ly;
      return {Field::sample(grid, [&](double x, double y) {
        const double d = std::sqrt((x - cx) * (x - cx) / 0.35 + (y - cy) * (y - cy) / 1.5);
        return std::tanh((0.35 * kPi - d) / (std::sqrt(2.0) * eps));
      })};
    }
    case InitKind::RandomTwoField: {
      const Field n1 = centred_noise(grid, rng);
      const Field n2 = centred_noise(grid, rng);
      return {offset_scaled(n1, 0.0, 0.01), offset_scaled(n2, 0.2, 0.01)};
    }
  }
  throw ConfigError("unknown init");
}

ModelPtr build_model(const RunConfig& cfg, const std::vector<Field>& initial) {
  auto p = [&](const char* key) { return model_param(cfg, key); };
  switch (cfg.model) {
    case ModelKind::CahnHilliard:
      return make_cahn_hilliard(
          {p("epsilon"), cfg.lambda_stab, cfg.c0, cfg.dealias.value_or(false)});
    case ModelKind::Pfc:
      return make_pfc({p("epsilon"), cfg.lambda_stab, cfg.c0, cfg.dealias.value_or(true)});
    case ModelKind::Vesicle:
      return make_vesicle({p("lambda_vesicle"), p("epsilon"), p("M1"), p("M2"), cfg.lambda_stab,
                           cfg.c0, cfg.dealias.value_or(false)},
                          initial.at(0));
    case ModelKind::Surfactant:
      return make_surfactant({p("M_phi"), p("M_rho"), p("epsilon"), p("delta"), p("gamma1"),
                              p("gamma2"), cfg.lambda_stab, cfg.c0,
                              cfg.dealias.value_or(true)});
  }
  throw ConfigError("unknown model");
}

RunResult simulate(const RunConfig& cfg, const RunOutput& output) {
  validate(cfg);
  std::vector<Field> init = build_initial(cfg);
  const ModelPtr model = build_model(cfg, init);
  OutputWriter out(cfg, *model, output.write_files);
  const bool sav = is_sav(cfg.scheme);
  RunResult res = sav ? run_sav(cfg, *model, std::move(init), out)
                      : run_rav(cfg, *model, std::move(init), out);
  out.finish(res, sav);
  return res;
}

int harness_threads() {
  if (const char* env = std::getenv("RAVFLOW_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int cmd_run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const RunResult res = simulate(cfg);
    const StepRecord& last = res.records.back();
    log << "run " << to_string(cfg.model) << '/' << to_string(cfg.scheme) << ": " << last.n
        << " steps to t = " << last.t << ", E = " << last.E << ", E_mod = " << last.E_mod;
    if (is_sav(cfg.scheme)) {
      log << ", max sav drift = " << res.max_sav_drift << '\n';
    } else {
      log << ", max|r| = " << res.max_abs_r << " (" << res.carried << " of "
          << res.zeroed + res.carried << " steps carried Q < 0)\n";
    }
    log << "output in " << cfg.output_dir.string() << '\n';
  });
}

int cmd_converge(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.dt_list.empty() || !cfg.dt_ref) {
      throw ConfigError("converge needs [time] dt_list and dt_ref");
    }
    RunConfig ref_cfg = cfg;
    ref_cfg.dt = *cfg.dt_ref;
    const RunResult ref = simulate(ref_cfg, {false});

    std::vector<RunResult> runs(cfg.dt_list.size());
    run_parallel(cfg.dt_list.size(), [&](std::size_t i) {
      RunConfig c = cfg;
      c.dt = cfg.dt_list[i];
      runs[i] = simulate(c, {false});
    });

    std::vector<ConvergenceInput> in;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      double l2sq = 0.0;
      double linf = 0.0;
      for (std::size_t f = 0; f < ref.final_fields.size(); ++f) {
        const ErrorNorms e = error_norms(runs[i].final_fields[f], ref.final_fields[f]);
        l2sq += e.l2 * e.l2;
        linf = std::max(linf, e.linf);
      }
      in.push_back({cfg.dt_list[i], std::sqrt(l2sq), linf, runs[i].max_abs_r});
    }
    const auto rows = convergence_rates(in);
    ensure_dir(cfg.output_dir);
    write_convergence_csv(cfg.output_dir / "convergence.csv", rows, cfg.seed);
    log << "convergence " << to_string(cfg.model) << '/' << to_string(cfg.scheme)
        << " at T = " << cfg.t_end << " (reference dt = " << *cfg.dt_ref << ")\n"
        << format_convergence_table(rows);
  });
}

int cmd_compare(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.model != ModelKind::CahnHilliard && cfg.model != ModelKind::Pfc) {
      throw ConfigError("compare supports the ch and pfc models only");
    }
    const std::vector<double> dts = cfg.dt_list.empty() ? std::vector<double>{cfg.dt}
                                                        : cfg.dt_list;
    struct Pair {
      RunResult rav, sav;
    };
    std::vector<Pair> pairs(dts.size());
    run_parallel(2 * dts.size(), [&](std::size_t job) {
      const std::size_t i = job / 2;
      RunConfig c = cfg;
      c.dt = dts[i];
      c.scheme = job % 2 == 0 ? SchemeKind::RavCn : SchemeKind::SavCn;
      c.output_dir = cfg.output_dir / label(dts[i]) / (job % 2 == 0 ? "rav" : "sav");
      c.snapshot_every = 0;
      (job % 2 == 0 ? pairs[i].rav : pairs[i].sav) = simulate(c);
    });

    log << "compare " << to_string(cfg.model) << " RAV-CN vs SAV-CN to T = " << cfg.t_end << '\n';
    for (std::size_t i = 0; i < dts.size(); ++i) {
      const auto& rav = pairs[i].rav.records;
      const auto& sav = pairs[i].sav.records;
      const std::filesystem::path path = cfg.output_dir / label(dts[i]) / "discrepancy.csv";
      std::ofstream os(path);
      if (!os) throw IoError("cannot open for writing: " + path.string());
      os << "# seed=" << cfg.seed << "\nt,rav_abs_r,sav_drift\n";
      char buf[128];
      for (std::size_t n = 0; n < rav.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rav[n].t, std::abs(rav[n].r),
                      sav[n].extra.back().second);
        os << buf;
      }
      if (!os) throw IoError("failed writing " + path.string());
      log << "  dt = " << dts[i] << ": |r_rav(T)| = " << std::abs(rav.back().r)
          << ", sav drift(T) = " << sav.back().extra.back().second << '\n';
    }
  });
}

}  // namespace ravflow
