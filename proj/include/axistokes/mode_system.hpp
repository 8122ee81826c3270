#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "axistokes/mesh.hpp"
#include "axistokes/mode_fn.hpp"
#include "axistokes/quadrature.hpp"

namespace axistokes {

using SpMat = Eigen::SparseMatrix<cplx>;
using SpMatR = Eigen::SparseMatrix<double>;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

/// Velocity dof index for P2 node n and component c (0 = r, 1 = theta, 2 = z).
inline std::size_t vdof(std::size_t node, int comp) { return 3 * node + static_cast<std::size_t>(comp); }

enum class DofKind {
  Free,
  Dirichlet,    ///< node on Gamma (including Gamma/Gamma0 corners)
  AxisZero,     ///< homogeneous axis condition
  AxisCoupled,  ///< |k| = 1 radial dof expressed through the azimuthal dof at the same node
};

/// Linear axis coupling: full[dependent] = factor * full[master].
struct AxisCoupling {
  std::size_t dependent;
  std::size_t master;
  cplx factor;
};

/// Taylor-Hood P2/P1 space at wavenumber k with Dirichlet and axis constraints.
struct FemSpace {
  const MeridianMesh* mesh = nullptr;
  int k = 0;
  std::size_t n_nodes = 0;     ///< P2 nodes
  std::size_t n_pressure = 0;  ///< P1 nodes (mesh vertices)
  std::vector<DofKind> kind;   ///< per full velocity dof
  std::vector<long> free_index;
  std::vector<std::size_t> free_dofs;  ///< full index of each free dof
  std::vector<AxisCoupling> couplings;
  std::vector<bool> on_gamma;  ///< per P2 node
  std::vector<bool> on_axis;   ///< per P2 node
  SpMat prolongation;          ///< full x free

  std::size_t n_full() const { return 3 * n_nodes; }
  std::size_t n_free() const { return free_dofs.size(); }
  std::size_t count(DofKind which) const;
};

FemSpace build_space(const MeridianMesh& mesh, int k);

/// Mode-k coefficient field: full P2 velocity vector and P1 pressure vector.
struct ModeField {
  int k = 0;
  VecC u;
  VecC p;

  /// Element-backed views; they reference this field and the mesh, which must outlive them.
  VectorModeFn velocity_fn(const MeridianMesh& mesh) const;
  ScalarModeFn pressure_fn(const MeridianMesh& mesh) const;
  /// Velocity and pressure at an arbitrary point (brute-force triangle location).
  bool evaluate(const MeridianMesh& mesh, double r, double z, std::array<cplx, 3>& u_out, cplx& p_out) const;
};

/// Bordered Hermitian system [[A, B^H], [B, 0]] on free velocity dofs, plus the data needed
/// to rebuild right-hand sides and expand solutions.
struct SaddleSystem {
  int k = 0;
  SpMat A;
  SpMat B;
  VecC rhs_u;
  VecC rhs_p;
  std::optional<VecR> mean_constraint;

  SpMat A_full;
  SpMat B_full;
  SpMatR pressure_mass;  ///< int psi_i psi_j r
  VecC load_full;        ///< int f . phi_i r before constraints
  VecC lift;             ///< nodal-interpolation lifting of the Dirichlet data

  std::shared_ptr<const FemSpace> space;

  /// Recomputes rhs_u and rhs_p from load_full and lift.
  void update_rhs();
  /// Full solution from free velocity values and pressure.
  ModeField expand(const VecC& u_free, const VecC& p) const;
  /// Free-dof restriction P^H x of a full-length vector.
  VecC restrict(const VecC& full) const;
  /// Complete bordered matrix (with the k = 0 multiplier row when present).
  SpMat bordered() const;
};

SaddleSystem assemble(std::shared_ptr<const FemSpace> space, const MeridianMesh& mesh, int k,
                      const QuadratureRule& rule = rule_degree5());

/// Full-length load vector b_(i,c) = int f_c phi_i r dr dz.
VecC assemble_rhs(const FemSpace& space, const VectorModeFn& f, const QuadratureRule& rule = rule_degree5());

/// Installs a load vector and refreshes the right-hand sides.
void set_load(SaddleSystem& system, const VecC& load_full);

struct DirichletReport {
  cplx flux{};  ///< int_Gamma (g_r n_r + g_z n_z) r ds; must vanish at k = 0
  bool flux_violation = false;
  std::vector<std::string> warnings;
};

/// Imposes g on Gamma by nodal interpolation. Corner values that break the axis
/// condition are kept and reported.
DirichletReport set_dirichlet(SaddleSystem& system, const VectorModeFn& g, double tolerance = 1e-10);

/// Boundary flux of a closed-form mode field over the Gamma edges.
cplx boundary_flux(const MeridianMesh& mesh, const VectorModeFn& g, int gauss_points = 8);

/// Nodal interpolation of closed-form fields into a ModeField.
ModeField interpolate(const MeridianMesh& mesh, const VectorModeFn& u, const ScalarModeFn& p, int k);

/// `axistokes-coo v1` debug export.
void export_coo(const SpMat& m, const std::filesystem::path& path);
std::string format_coo(const SpMat& m);

}  // namespace axistokes
