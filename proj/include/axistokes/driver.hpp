#pragma once

#include <optional>
#include <string>
#include <vector>

#include "axistokes/config.hpp"
#include "axistokes/fourier.hpp"

namespace axistokes {

struct ModeSummary {
  int k = 0;
  bool solved = false;    ///< false for mirrored modes and modes with no data
  bool mirrored = false;  ///< filled by conjugation from -k
  double velocity_norm = 0.0;  ///< H^1_(k)
  double pressure_norm = 0.0;  ///< L^2_1
  double res_u = 0.0;
  double res_p = 0.0;
  int iterations = 0;
};

struct SolveSummary {
  FourierStack stack;
  std::vector<ModeSummary> modes;
  std::optional<cplx> flux;  ///< k = 0 boundary flux when mode 0 is solved
  bool flux_violation = false;
  std::vector<std::string> warnings;
  /// Errors against the exact solution for manufactured data.
  std::optional<double> err_u, err_p;
};

/// Wavenumbers a run covers: the override list, or -N..N.
std::vector<int> run_wavenumbers(const RunConfig& config);

/// Extracts the mode data, solves each mode (k >= 0 only for real data, with -k filled by
/// conjugation) on a pool of `jobs` workers and collects norms and the k = 0 flux.
/// Throws SolverBreakdown from any failing mode.
SolveSummary run_solve(const RunConfig& config, const MeridianMesh& mesh, unsigned jobs = 1);

/// Human-readable report: one line per mode, then flux and error lines.
std::string format_summary(const SolveSummary& s);

}  // namespace axistokes
