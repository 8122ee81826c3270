#pragma once

#include <array>
#include <string>
#include <vector>

#include "axistokes/expr.hpp"
#include "axistokes/mesh.hpp"
#include "axistokes/mode_fn.hpp"

namespace axistokes {

/// Closed-form mode solution (u, p) with the forcing induced by the mode-k Stokes operator.
struct ManufacturedCase {
  std::string name;
  int k = 0;
  std::array<CExpr, 3> u;  ///< (u_r, u_theta, u_z)
  CExpr p;
  std::array<CExpr, 3> f;

  VectorModeFn velocity() const;
  ScalarModeFn pressure() const;
  VectorModeFn forcing() const;
  /// Dirichlet data: the velocity itself, restricted to Gamma by the caller.
  VectorModeFn boundary() const { return velocity(); }

  /// Copy whose pressure has zero r-weighted mean on `mesh` (k = 0 only; other k unchanged).
  ManufacturedCase mean_corrected(const MeridianMesh& mesh) const;
};

/// Closed-form mode function with symbolic derivatives.
ScalarModeFn to_fn(const CExpr& e);

/// Builds the case and derives f symbolically:
///   f_r     = -Lap_a u_r + (1+k^2)/r^2 u_r + 2ik/r^2 u_theta + d_r p
///   f_theta = -Lap_a u_theta + (1+k^2)/r^2 u_theta - 2ik/r^2 u_r + ik/r p
///   f_z     = -Lap_a u_z + k^2/r^2 u_z + d_z p
ManufacturedCase make_case(std::string name, int k, CExpr u_r, CExpr u_theta, CExpr u_z, CExpr p);

/// Divergence-free case at k != 0: u_r = r^{|k|-1} R, u_z = r^{|k|} Z and u_theta solving div_k u = 0;
/// the pressure is r^{|k|} P.
ManufacturedCase make_solenoidal_case(std::string name, int k, const CExpr& R, const CExpr& Z, const CExpr& P);

/// Divergence-free case at k = 0 from a stream function F and swirl profile G:
/// u = (r d_z F, r G, -(2F + r d_r F)).
ManufacturedCase make_axisymmetric_case(std::string name, const Expr& F, const Expr& G, const Expr& p);

/// Case at -k with conjugated fields; its forcing is the conjugate of the original.
ManufacturedCase conjugate_case(const ManufacturedCase& c);

struct StrongResidual {
  std::array<cplx, 3> momentum{};
  cplx divergence{};
};

/// Pointwise residual of the mode-k equations, f - L(u, p) and div_k u. Requires r > 0.
StrongResidual strong_residual(const ManufacturedCase& c, double r, double z);

struct CaseValidation {
  double max_residual = 0.0;
  double divergence_l2 = 0.0;
  double axis_violation = 0.0;
  double pressure_mean = 0.0;
  bool admitted = false;
  std::string reason;
};

/// Admission checks: strong residual at sampled interior points, divergence by quadrature,
/// axis conditions at sampled Gamma0 points, pressure mean at k = 0.
CaseValidation validate_case(const ManufacturedCase& c, const MeridianMesh& mesh, unsigned seed = 17);

/// Built-in case names: exact_k0, exact_k1, exact_k3, smooth_k0, smooth_k1, smooth_k3, smooth_k<n>.
ManufacturedCase builtin_case(const std::string& name);
std::vector<std::string> builtin_case_names();

}  // namespace axistokes
