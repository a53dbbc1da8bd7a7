#include "model_util.hpp"
#include "ravflow/errors.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

namespace {

// Swift-Hohenberg energy: 1/2 phi (1 + Lap)^2 phi + phi^4/4 - phi^3/3 - eps phi^2/2.
class PhaseFieldCrystal final : public Model {
 public:
  explicit PhaseFieldCrystal(const PfcParams& p)
      : Model({FieldOperator{"phi", FlowType::HMinus1, 1.0,
                             [ls = p.lambda_stab](double kx, double ky) {
                               const double s = 1.0 - (kx * kx + ky * ky);
                               return s * s + ls;
                             }}},
              p.lambda_stab, p.c0, p.dealias),
        epsilon_(p.epsilon) {}

  std::string_view name() const override { return "pfc"; }

  double nonlinear_energy(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const double c2 = 0.5 * (epsilon_ + lambda_stab());
    return detail::integrate(phi.grid(), [&](std::size_t k) {
      const double u = phi[k];
      const double u2 = u * u;
      return 0.25 * u2 * u2 - u2 * u / 3.0 - c2 * u2;
    });
  }

  std::vector<Field> nonlinear_force(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const double c1 = epsilon_ + lambda_stab();
    Field out(phi.grid());
    kernels::parallel_for(phi.size(), [&](std::size_t k) {
      const double u = phi[k];
      out[k] = u * u * u - u * u - c1 * u;
    });
    return {std::move(out)};
  }

 private:
  double epsilon_;
};

}  // namespace

ModelPtr make_pfc(const PfcParams& p) {
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) {
    throw ConfigError("pfc epsilon must lie in (0, 1)");
  }
  return std::make_shared<PhaseFieldCrystal>(p);
}

}  // namespace ravflow
