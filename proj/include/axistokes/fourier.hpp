#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "axistokes/mesh.hpp"
#include "axistokes/mode_fn.hpp"
#include "axistokes/mode_system.hpp"

namespace axistokes {

using Vec3 = std::array<cplx, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// 3D field in Cartesian components, sampled in cylindrical coordinates.
using CartesianField = std::function<Vec3(double r, double theta, double z)>;
using ScalarField3 = std::function<cplx(double r, double theta, double z)>;

class AliasingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Maps cylindrical components (r, theta, z) to Cartesian components at angle theta.
Mat3 rotation(double theta);
Vec3 mat_vec(const Mat3& m, const Vec3& v);

/// Throws AliasingError unless n_theta is a power of two with n_theta >= 4 |k_max| + 2.
void check_angular_resolution(int k_max, int n_theta);
/// Smallest admissible power of two for wavenumbers up to |k_max| (at least 8).
int default_n_theta(int k_max);

/// Equispaced angles in (-pi, pi].
std::vector<double> angular_nodes(int n_theta);

/// k-th coefficient (1/sqrt(2 pi)) int R_{-theta} f e^{-ik theta} dtheta in cylindrical
/// components, by the trapezoid rule. Only values are provided (no derivatives).
VectorModeFn extract_coefficient(const CartesianField& field, int k, int n_theta);
ScalarModeFn extract_scalar_coefficient(const ScalarField3& field, int k, int n_theta);

/// Pointwise variants, used by the evaluators above.
Vec3 coefficient_at(const CartesianField& field, int k, int n_theta, double r, double z);
cplx scalar_coefficient_at(const ScalarField3& field, int k, int n_theta, double r, double z);

/// Truncated Fourier series of FEM mode fields.
struct FourierStack {
  int N = 0;
  bool real_data = false;
  std::string mesh_id;
  std::map<int, ModeField> modes;

  /// Fills mode -k with the conjugate of mode k for every stored k > 0 (real data only).
  void mirror_conjugates();
  /// Largest |conj(mode(-k)) - mode(k)| over stored pairs.
  double conjugate_symmetry_defect() const;
};

/// Truncated series with closed-form modes.
struct FnStack {
  int N = 0;
  bool real_data = false;
  std::map<int, VectorModeFn> velocity;
  std::map<int, ScalarModeFn> pressure;
};

struct Reconstruction {
  Vec3 u{};  ///< Cartesian components
  cplx p{};
};

/// (1/sqrt(2 pi)) sum_k R_theta u^k e^{ik theta} and the matching pressure sum.
/// Returns p = u = 0 when (r, z) lies outside the mesh.
Reconstruction reconstruct(const FourierStack& stack, const MeridianMesh& mesh, double r, double theta, double z);
/// Same series evaluated from the nodal values of mesh vertex v.
Reconstruction reconstruct_at_vertex(const FourierStack& stack, std::size_t v, double theta);
Reconstruction reconstruct(const FnStack& stack, double r, double theta, double z);

/// (sum_k (1 + k^2)^s n_k^2)^{1/2} for per-mode norms n_k.
double anisotropic_norm(const std::map<int, double>& mode_norms, double s);

/// Per-mode H^1_(k) velocity norms of an FEM stack.
std::map<int, double> velocity_mode_norms(const FourierStack& stack, const MeridianMesh& mesh);

/// sum_k (sum_{l <= s} k^{2l}) n_k^2 for integer s, i.e. the squared norm of the angular
/// derivatives up to order s.
double angular_derivative_norm_sq(const std::map<int, double>& mode_norms, int s);

/// Directory layout: stack.meta, mesh.txt and mode_{k}.csv per stored mode.
void write_stack(const FourierStack& stack, const MeridianMesh& mesh, const std::filesystem::path& dir);
FourierStack read_stack(const std::filesystem::path& dir, MeridianMesh& mesh_out);

}  // namespace axistokes
