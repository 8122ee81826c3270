#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "axistokes/expr.hpp"
#include "axistokes/mesh.hpp"
#include "axistokes/saddle_solver.hpp"
#include "axistokes/verification.hpp"

namespace axistokes {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form 3D data in cylindrical components over (r, z, theta).
struct ExpressionData {
  std::array<Expr, 3> forcing;   ///< f_r, f_theta, f_z
  std::array<Expr, 3> boundary;  ///< g_r, g_theta, g_z
};

/// Run description read from an INI file with sections domain, modes, data, solver,
/// output, truncation and verify.
struct RunConfig {
  std::optional<DomainSpec> domain;
  std::optional<std::filesystem::path> mesh_path;

  int N = 0;
  std::optional<std::vector<int>> wavenumbers;  ///< replaces -N..N when set
  int n_theta = 0;                              ///< 0 picks the smallest admissible value

  std::optional<std::string> manufactured;
  std::optional<ExpressionData> expressions;

  SolverConfig solver;

  std::filesystem::path output_dir = "out";
  std::vector<std::string> formats{"stack"};  ///< any of stack, vtk
  int vtk_n_theta = 16;

  DecayFamily family;
  std::vector<int> truncation_N{2, 4, 8, 16, 32};
  int truncation_k_max_cap = 256;

  VerifyOptions verify;

  bool has_data() const { return manufactured || expressions; }
  /// Throws ConfigError unless exactly one data source is present.
  void require_data() const;
  MeridianMesh build_mesh() const;
};

/// Parses INI text; throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace axistokes
