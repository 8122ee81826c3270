#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "axistokes/mode_system.hpp"

namespace axistokes {

struct SolverConfig {
  enum class Method { Direct, UzawaCG };
  Method method = Method::Direct;
  double rel_tol = 1e-10;
  int max_iter = 1000;
  bool pressure_mass_precond = true;

  void validate() const;
};

SolverConfig::Method parse_method(const std::string& name);
std::string method_name(SolverConfig::Method m);

struct ResidualEntry {
  int iter = 0;
  double res_u = 0.0;
  double res_p = 0.0;
};

struct SolveReport {
  double res_u = 0.0;  ///< relative velocity-block residual
  double res_p = 0.0;  ///< relative pressure-block residual
  int iterations = 0;
  cplx multiplier{};   ///< k = 0 mean-constraint multiplier
  std::vector<ResidualEntry> history;
};

struct SolveResult {
  ModeField field;
  SolveReport report;
};

class SolverBreakdown : public std::runtime_error {
 public:
  SolverBreakdown(const std::string& what, std::vector<ResidualEntry> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<ResidualEntry>& history() const { return history_; }

 private:
  std::vector<ResidualEntry> history_;
};

SolveResult solve(const SaddleSystem& system, const SolverConfig& cfg = {});

/// k = 0 with real data: solves the meridional (u_r, u_z, p) system and the swirl u_theta
/// system separately in real arithmetic.
SolveResult solve_axisymmetric_real(const SaddleSystem& system, const SolverConfig& cfg = {});

void write_residual_history(const std::vector<ResidualEntry>& history, const std::filesystem::path& path);

struct InfSupEstimate {
  double beta_h = 0.0;
  double mesh_h = 0.0;
  int k = 0;
  int iterations = 0;
};

/// sqrt of the smallest eigenvalue of B A^{-1} B^H q = lambda M_p q (constants removed
/// at k = 0) by Lanczos in the M_p inner product.
InfSupEstimate estimate_inf_sup(const SaddleSystem& system, const SolverConfig& cfg = {}, double tol = 1e-6);

/// sqrt(Re f^H A^{-1} f) for a functional given on the free velocity dofs.
double dual_mode_norm(const SaddleSystem& system, const VecC& f_free);

}  // namespace axistokes
