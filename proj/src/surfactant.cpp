#include "model_util.hpp"
#include "ravflow/errors.hpp"
#include "ravflow/models.hpp"

namespace ravflow {

namespace {

Symbol shifted_laplacian(double ls) {
  return [ls](double kx, double ky) { return kx * kx + ky * ky + ls; };
}

// Two coupled H^-1 flows (phi, rho) sharing one nonlinear energy.
class Surfactant final : public Model {
 public:
  explicit Surfactant(const SurfactantParams& p)
      : Model({FieldOperator{"phi", FlowType::HMinus1, p.m_phi, shifted_laplacian(p.lambda_stab)},
               FieldOperator{"rho", FlowType::HMinus1, p.m_rho, shifted_laplacian(p.lambda_stab)}},
              p.lambda_stab, p.c0, p.dealias),
        p_(p) {}

  std::string_view name() const override { return "surfactant"; }

  double nonlinear_energy(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const Field& rho = fields[1];
    const auto [gx, gy] = gradient(phi);
    const double cf = 0.25 / (p_.epsilon * p_.epsilon);
    const double cg = 0.25 / (p_.delta * p_.delta);
    const double g1 = p_.gamma1;
    const double g2c = p_.gamma2;
    const double ls = lambda_stab();
    return detail::integrate(phi.grid(), [&](std::size_t k) {
      const double u = phi[k];
      const double v = rho[k];
      const double w = u * u - 1.0;
      const double s = v * (v - 1.0);
      const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
      return cf * w * w + cg * s * s - 0.5 * g1 * v * g2 + 0.25 * g2c * g2 * g2 -
             0.5 * ls * (u * u + v * v);
    });
  }

  std::vector<Field> nonlinear_force(std::span<const Field> fields) const override {
    check_fields(fields);
    const Field& phi = fields[0];
    const Field& rho = fields[1];
    const Grid2D& grid = phi.grid();
    const auto [gx, gy] = gradient(phi);

    // gamma1 rho grad phi - gamma2 |grad phi|^2 grad phi, then one divergence.
    Field fx(grid), fy(grid);
    kernels::parallel_for(phi.size(), [&](std::size_t k) {
      const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
      const double c = p_.gamma1 * rho[k] - p_.gamma2 * g2;
      fx[k] = c * gx[k];
      fy[k] = c * gy[k];
    });
    const Field div = divergence(fx, fy);

    const double cf = 1.0 / (p_.epsilon * p_.epsilon);
    const double cg = 0.5 / (p_.delta * p_.delta);
    const double ls = lambda_stab();
    Field n_phi(grid), n_rho(grid);
    kernels::parallel_for(phi.size(), [&](std::size_t k) {
      const double u = phi[k];
      const double v = rho[k];
      const double g2 = gx[k] * gx[k] + gy[k] * gy[k];
      n_phi[k] = cf * (u * u * u - u) + div[k] - ls * u;
      // G'(rho) = rho (rho - 1) (2 rho - 1) / (2 delta^2)
      n_rho[k] = cg * v * (v - 1.0) * (2.0 * v - 1.0) - 0.5 * p_.gamma1 * g2 - ls * v;
    });
    std::vector<Field> out;
    out.push_back(std::move(n_phi));
    out.push_back(std::move(n_rho));
    return out;
  }

 private:
  SurfactantParams p_;
};

}  // namespace

ModelPtr make_surfactant(const SurfactantParams& p) {
  if (!(p.epsilon > 0.0 && p.delta > 0.0)) {
    throw ConfigError("surfactant epsilon and delta must be positive");
  }
  if (!(p.m_phi > 0.0 && p.m_rho > 0.0)) {
    throw ConfigError("surfactant mobilities must be positive");
  }
  return std::make_shared<Surfactant>(p);
}

}  // namespace ravflow
