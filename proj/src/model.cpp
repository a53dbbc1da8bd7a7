#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "model_util.hpp"
#include "ravflow/errors.hpp"
#include "ravflow/kernels.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

struct Model::TableCache {
  std::mutex mutex;
  std::map<std::tuple<std::size_t, int, int, double, double>,
           std::shared_ptr<const ModeTables>>
      tables;
};

Model::Model(std::vector<FieldOperator> ops, double lambda_stab, double c0, bool dealias)
    : ops_(std::move(ops)),
      lambda_stab_(lambda_stab),
      c0_(c0),
      dealias_(dealias),
      cache_(std::make_shared<TableCache>()) {
  if (!(lambda_stab >= 0.0)) throw ConfigError("lambda_stab must be >= 0");
  if (!std::isfinite(c0)) throw ConfigError("C0 must be finite");
  for (const auto& op : ops_) {
    if (!(op.mobility > 0.0)) throw ConfigError("mobility must be positive");
  }
}

Symbol Model::dissipation_symbol(std::size_t i) const {
  const FieldOperator& op = ops_.at(i);
  const double m = op.mobility;
  if (op.flow == FlowType::HMinus1) {
    return [m](double kx, double ky) { return -m * (kx * kx + ky * ky); };
  }
  return [m](double, double) { return -m; };
}

std::shared_ptr<const Model::ModeTables> Model::mode_tables(std::size_t i,
                                                            const Grid2D& grid) const {
  const auto key = std::make_tuple(i, grid.nx(), grid.ny(), grid.lx(), grid.ly());
  std::lock_guard lock(cache_->mutex);
  auto it = cache_->tables.find(key);
  if (it != cache_->tables.end()) return it->second;
  const auto ctx = SpectralContext::get(grid);
  auto t = std::make_shared<ModeTables>();
  t->implicit = ctx->tabulate(ops_.at(i).implicit);
  t->dissipation = ctx->tabulate(dissipation_symbol(i));
  cache_->tables.emplace(key, t);
  return t;
}

void Model::check_fields(std::span<const Field> fields) const {
  if (fields.size() != ops_.size()) {
    throw InvalidFieldError("model expects a different number of fields");
  }
  for (const Field& f : fields) require_same_grid(f, fields[0]);
}

double quadratic_energy(const Model& model, std::span<const Field> fields) {
  if (fields.size() != model.n_fields()) {
    throw InvalidFieldError("model expects a different number of fields");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const Grid2D& grid = fields[i].grid();
    const auto ctx = SpectralContext::get(grid);
    const auto tables = model.mode_tables(i, grid);
    const Spectrum s = forward(fields[i]);
    const auto w = ctx->parseval_weight();
    const auto& l = tables->implicit;
    const auto c = s.coeffs();
    sum += 0.5 * kernels::parallel_sum(c.size(), [&](std::size_t k) {
      return w[k] * l[k] * std::norm(c[k]);
    });
  }
  return sum;
}

double energy(const Model& model, std::span<const Field> fields) {
  return quadratic_energy(model, fields) + model.nonlinear_energy(fields);
}

std::vector<Field> chemical_potential(const Model& model, std::span<const Field> fields) {
  std::vector<Field> mu = model.nonlinear_force(fields);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto tables = model.mode_tables(i, fields[i].grid());
    const Field lphi = inverse(apply_table(forward(fields[i]), tables->implicit));
    mu[i] = lphi + mu[i];
  }
  return mu;
}

}  // namespace ravflow
