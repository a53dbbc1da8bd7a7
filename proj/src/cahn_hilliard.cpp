#include <cmath>

#include "model_util.hpp"
#include "ravflow/errors.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

namespace {

// F(phi) = (phi^2 - 1)^2 / 4, H^-1 flow with unit mobility.
class CahnHilliard final : public Model {
 public:
  explicit CahnHilliard(const CahnHilliardParams& p)
      : Model({FieldOperator{"phi", FlowType::HMinus1, 1.0,
                             [e2 = p.epsilon * p.epsilon, ls = p.lambda_stab](double kx, double ky) {
                               return e2 * (kx * kx + ky * ky) + ls;
                             }}},
              p.lambda_stab, p.c0, p.dealias) {}

  std::string_view name() const override { return "ch"; }

  double nonlinear_energy(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const double ls = lambda_stab();
    return detail::integrate(phi.grid(), [&](std::size_t k) {
      const double u = phi[k];
      const double w = u * u - 1.0;
      return 0.25 * w * w - 0.5 * ls * u * u;
    });
  }

  std::vector<Field> nonlinear_force(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const double ls = lambda_stab();
    Field out(phi.grid());
    kernels::parallel_for(phi.size(), [&](std::size_t k) {
      const double u = phi[k];
      out[k] = u * u * u - u - ls * u;
    });
    return {std::move(out)};
  }
};

}  // namespace

ModelPtr make_cahn_hilliard(const CahnHilliardParams& p) {
  if (!(p.epsilon > 0.0)) throw ConfigError("cahn-hilliard epsilon must be positive");
  return std::make_shared<CahnHilliard>(p);
}

}  // namespace ravflow
