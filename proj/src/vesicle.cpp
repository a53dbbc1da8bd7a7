#include <cmath>

#include "model_util.hpp"
#include "ravflow/errors.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

namespace {

double volume_of(const Field& phi) {
  return detail::integrate(phi.grid(), [&](std::size_t k) { return phi[k] + 1.0; });
}

double area_from_gradient(const Field& phi, const Field& gx, const Field& gy, double eps) {
  return detail::integrate(phi.grid(), [&](std::size_t k) {
    const double u = phi[k];
    const double w = u * u - 1.0;
    const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
    return 0.5 * eps * g2 + 0.25 * w * w / eps;
  });
}

double area_of(const Field& phi, double eps) {
  const auto [gx, gy] = gradient(phi);
  return area_from_gradient(phi, gx, gy, eps);
}

// Bending energy with volume and area penalties, L2 flow. Only the
// biharmonic term and the stabilisation are implicit; everything else,
// including the anti-diffusive -(2 lambda / eps) |grad phi|^2 part, lives in E1.
class Vesicle final : public Model {
 public:
  Vesicle(const VesicleParams& p, VesicleTargets targets)
      : Model({FieldOperator{"phi", FlowType::L2, 1.0,
                             [c = p.lambda * p.epsilon, ls = p.lambda_stab](double kx, double ky) {
                               const double k2 = kx * kx + ky * ky;
                               return c * k2 * k2 + ls;
                             }}},
              p.lambda_stab, p.c0, p.dealias),
        p_(p),
        targets_(targets) {}

  std::string_view name() const override { return "vesicle"; }
  const VesicleParams& params() const { return p_; }
  VesicleTargets targets() const { return targets_; }

  double nonlinear_energy(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const auto [gx, gy] = gradient(phi);
    const double lam = p_.lambda;
    const double eps = p_.epsilon;
    const double ls = lambda_stab();
    const double bulk = detail::integrate(phi.grid(), [&](std::size_t k) {
      const double u = phi[k];
      const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
      const double fp = u * u * u - u;
      return -lam / eps * g2 + 3.0 * lam / eps * u * u * g2 +
             0.5 * lam / (eps * eps * eps) * fp * fp - 0.5 * ls * u * u;
    });
    const double dv = volume_of(phi) - targets_.volume;
    const double da = area_from_gradient(phi, gx, gy, eps) - targets_.area;
    return bulk + 0.5 * lam * p_.m1 * dv * dv + 0.5 * lam * p_.m2 * da * da;
  }

  std::vector<Field> nonlinear_force(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const Grid2D& grid = phi.grid();
    const double lam = p_.lambda;
    const double eps = p_.epsilon;
    const double ls = lambda_stab();

    // The Laplacians are div(grad .) rather than the -k^2 symbol so that the
    // force is the exact derivative of the discrete gradient terms in E1.
    // All of them are folded into a single divergence:
    //   (2 lam/eps - pa eps) div(grad u) - (6 lam/eps) div(u^2 grad u)
    auto [gx, gy] = gradient(phi);
    const double dv = volume_of(phi) - targets_.volume;
    const double da = area_from_gradient(phi, gx, gy, eps) - targets_.area;
    const double pv = lam * p_.m1 * dv;
    const double pa = lam * p_.m2 * da;

    const double c_lap = 2.0 * lam / eps - pa * eps;
    const double c_u2 = 6.0 * lam / eps;
    Field fx(grid), fy(grid);
    kernels::parallel_for(phi.size(), [&](std::size_t k) {
      const double c = c_lap - c_u2 * phi[k] * phi[k];
      fx[k] = c * gx[k];
      fy[k] = c * gy[k];
    });
    const Field div = divergence(fx, fy);

    Field out(grid);
    kernels::parallel_for(phi.size(), [&](std::size_t k) {
      const double u = phi[k];
      const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
      const double fp = u * u * u - u;
      const double fpp = 3.0 * u * u - 1.0;
      out[k] = div[k] + c_u2 * u * g2 + lam / (eps * eps * eps) * fp * fpp + pv +
               pa * fp / eps - ls * u;
    });
    return {std::move(out)};
  }

 private:
  VesicleParams p_;
  VesicleTargets targets_;
};

const Vesicle& as_vesicle(const Model& model) {
  const auto* v = dynamic_cast<const Vesicle*>(&model);
  if (v == nullptr) {
    throw UnsupportedOperation("volume/area functionals need a vesicle model, got " +
                               std::string(model.name()));
  }
  return *v;
}

}  // namespace

ModelPtr make_vesicle(const VesicleParams& p, const Field& phi0) {
  if (!(p.lambda > 0.0 && p.epsilon > 0.0 && p.m1 > 0.0 && p.m2 > 0.0)) {
    throw ConfigError("vesicle lambda, epsilon, M1 and M2 must be positive");
  }
  if (!phi0.all_finite()) throw InvalidFieldError("vesicle initial field is not finite");
  const VesicleTargets t{volume_of(phi0), area_of(phi0, p.epsilon)};
  return std::make_shared<Vesicle>(p, t);
}

double vesicle_volume(const Model& model, const Field& phi) {
  as_vesicle(model);
  return volume_of(phi);
}

double vesicle_area(const Model& model, const Field& phi) {
  return area_of(phi, as_vesicle(model).params().epsilon);
}

VesicleTargets vesicle_targets(const Model& model) { return as_vesicle(model).targets(); }

}  // namespace ravflow
