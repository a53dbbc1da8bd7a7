#pragma once

// Gradient-flow models in the split form used by the auxiliary-variable
// schemes:
//
//   E[phi] = 1/2 sum_i (phi_i, l_i phi_i) + E1[phi]
//   d phi_i / dt = G_i mu_i,   mu_i = l_i phi_i + N_i(phi)
//
// l_i is the implicitly treated symbol (linear operator plus the
// stabilisation lambda_s), E1 is the remaining non-quadratic energy with the
// lambda_s/2 ||phi_i||^2 terms subtracted, and N_i = dE1/dphi_i. G_i is
// M_i * Laplacian (H^-1 flow) or -M_i (L2 flow).

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ravflow/grid.hpp"

namespace ravflow {

enum class FlowType { HMinus1, L2 };

struct FieldOperator {
  std::string name;  // "phi", "rho", ...
  FlowType flow;
  double mobility;
  Symbol implicit;   // l(k) >= 0, stabilisation included
};

class Model {
 public:
  virtual ~Model() = default;

  virtual std::string_view name() const = 0;

  std::size_t n_fields() const { return ops_.size(); }
  const FieldOperator& field_operator(std::size_t i) const { return ops_.at(i); }
  double lambda_stab() const { return lambda_stab_; }
  double c0() const { return c0_; }
  bool dealias() const { return dealias_; }

  /// Dissipation symbol g(k) <= 0 of field i.
  Symbol dissipation_symbol(std::size_t i) const;

  /// Per-mode tables of l_i and g_i on `grid`, computed once and cached.
  struct ModeTables {
    std::vector<double> implicit;
    std::vector<double> dissipation;
  };
  std::shared_ptr<const ModeTables> mode_tables(std::size_t i, const Grid2D& grid) const;

  /// E1 (non-quadratic energy remainder).
  virtual double nonlinear_energy(std::span<const Field> fields) const = 0;
  /// N_i = dE1 / dphi_i for every field.
  virtual std::vector<Field> nonlinear_force(std::span<const Field> fields) const = 0;

 protected:
  Model(std::vector<FieldOperator> ops, double lambda_stab, double c0, bool dealias);
  void check_fields(std::span<const Field> fields) const;

 private:
  std::vector<FieldOperator> ops_;
  double lambda_stab_;
  double c0_;
  bool dealias_;
  struct TableCache;
  std::shared_ptr<TableCache> cache_;
};

using ModelPtr = std::shared_ptr<const Model>;

struct CahnHilliardParams {
  double epsilon = 0.1;
  double lambda_stab = 2.0;
  double c0 = 1.0;
  bool dealias = false;
};

struct PfcParams {
  double epsilon = 0.02;
  double lambda_stab = 2.0;
  double c0 = 1.0;
  bool dealias = true;
};

struct VesicleParams {
  double lambda = 1e-3;  // surface tension coefficient
  double epsilon = 0.1;
  double m1 = 5e4;       // volume penalty
  double m2 = 5e4;       // area penalty
  double lambda_stab = 2.0;
  double c0 = 1.0;
  bool dealias = false;
};

struct SurfactantParams {
  double m_phi = 2e-3;
  double m_rho = 2e-3;
  double epsilon = 0.08;
  double delta = 0.08;
  double gamma1 = 0.5;
  double gamma2 = 1e-4;
  double lambda_stab = 2.0;
  double c0 = 1.0;
  bool dealias = true;
};

/// Volume and area targets of the vesicle penalties, frozen from phi0.
struct VesicleTargets {
  double volume;  // A(phi0)
  double area;    // B(phi0)
};

ModelPtr make_cahn_hilliard(const CahnHilliardParams& p);
ModelPtr make_pfc(const PfcParams& p);
ModelPtr make_vesicle(const VesicleParams& p, const Field& phi0);
ModelPtr make_surfactant(const SurfactantParams& p);

/// Full energy E = 1/2 sum (phi_i, l_i phi_i) + E1.
double energy(const Model& model, std::span<const Field> fields);
/// Quadratic part 1/2 sum (phi_i, l_i phi_i) only.
double quadratic_energy(const Model& model, std::span<const Field> fields);
/// mu_i = l_i phi_i + N_i.
std::vector<Field> chemical_potential(const Model& model, std::span<const Field> fields);

/// A(phi) = int (phi + 1). Vesicle models only.
double vesicle_volume(const Model& model, const Field& phi);
/// B(phi) = int (eps/2 |grad phi|^2 + F(phi)/eps). Vesicle models only.
double vesicle_area(const Model& model, const Field& phi);
VesicleTargets vesicle_targets(const Model& model);

}  // namespace ravflow
