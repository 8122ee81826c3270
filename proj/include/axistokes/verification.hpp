#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "axistokes/fourier.hpp"
#include "axistokes/manufactured.hpp"
#include "axistokes/mesh.hpp"
#include "axistokes/norms.hpp"
#include "axistokes/saddle_solver.hpp"

namespace axistokes {

// ---- pass/fail reporting ----

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
};

/// `CHECK name PASS|FAIL value tolerance`
std::string format_check(const CheckResult& c);

struct CheckSummary {
  std::vector<CheckResult> checks;

  /// Records value <= tolerance.
  void at_most(const std::string& name, double value, double tolerance);
  /// Records value >= tolerance.
  void at_least(const std::string& name, double value, double tolerance);
  void add(CheckResult c) { checks.push_back(std::move(c)); }
  void append(const CheckSummary& other);
  bool all_pass() const;
  std::string format() const;
};

// ---- domains ----

/// Unit square [0,1]^2, meshed with the structured generator.
DomainSpec unit_square(double h, unsigned level = 0);
/// L-shaped domain [0,1]^2 minus (1/2,1]^2.
DomainSpec l_shape(double h, unsigned level = 0);
/// Structured mesh for axis-aligned rectangles, ear-clipping triangulation otherwise.
MeridianMesh mesh_domain(const DomainSpec& spec);

// ---- manufactured-solution convergence ----

struct ConvergenceRow {
  double h = 0.0;
  std::size_t velocity_dofs = 0;  ///< full P2 velocity dofs
  double err_u = 0.0;             ///< H^1_(k) velocity error
  double rate_u = 0.0;
  double err_p = 0.0;  ///< L^2_1 pressure error
  double rate_p = 0.0;
};

struct ConvergenceTable {
  std::string case_name;
  int k = 0;
  std::vector<ConvergenceRow> rows;
  bool monotone = true;
  std::string diagnostic;  ///< per-level details when the errors are not monotone

  static std::string csv_header();  ///< h,err_u,rate_u,err_p,rate_p
  std::string csv() const;
};

/// Solves the case on `levels` nested uniform refinements of `coarse`. Rejects cases that
/// fail admission.
ConvergenceTable convergence_study(const ManufacturedCase& c, const MeridianMesh& coarse, int levels,
                                   const SolverConfig& cfg = {}, const QuadratureRule& rule = rule_degree10());

// ---- truncation ----

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mode-norm sequence a_k = (1 + |k|)^{-(s+1)}, optionally zero for |k| > last_mode.
struct DecayFamily {
  double s = 1.0;
  std::optional<int> last_mode;

  double amplitude(int k) const;
};

struct TruncationRow {
  int N = 0;
  double tail = 0.0;
  double bound_ratio = 0.0;  ///< tail * N^s
};

struct TruncationTable {
  double s = 0.0;
  int k_max = 0;
  std::vector<TruncationRow> rows;
  double slope = 0.0;         ///< log-log slope over the two largest N
  double fitted_slope = 0.0;  ///< least-squares slope over all N with tail > 0
  double bound_spread = 0.0;  ///< max/min of tail * N^s

  static std::string csv_header();  ///< N,tail,bound_ratio
  std::string csv() const;
};

struct TruncationOptions {
  int k_max_cap = 1 << 20;
  double tail_tolerance = 0.01;  ///< relative size of the estimated unsummed remainder
};

/// tail(N)^2 = sum_{|k| > N} m(k) up to an automatically enlarged cutoff K_max >= 4 max(N).
/// `mode_norm_sq(k)` returns ||u^k||^2 + ||p^k||^2. Throws TruncationError when the cutoff cap
/// is reached before the remainder estimate drops below the tolerance.
TruncationTable truncation_from_mode_norms(const std::function<double(int)>& mode_norm_sq, double s,
                                           const std::vector<int>& N_list, const TruncationOptions& opt = {});

/// Analytic mode norms a_k^2.
TruncationTable truncation_study(const DecayFamily& family, const std::vector<int>& N_list,
                                 const TruncationOptions& opt = {});

struct SolveStudyOptions {
  SolverConfig solver;
  unsigned jobs = 1;
  int k_max_cap = 256;
};

/// Per-mode FEM solves on `mesh` with forcing a_k * f_shape / ||f_shape||_{H^-1_(k)} and
/// homogeneous Dirichlet data. Real data: only k >= 0 is solved.
TruncationTable truncation_study_with_solves(const DecayFamily& family, const std::vector<int>& N_list,
                                             const MeridianMesh& mesh, const SolveStudyOptions& opt = {});

/// ||u||^2_{H^1_(k)} + ||p||^2_{L^2_1} of the solution with unit dual-norm forcing shape at wavenumber k.
double unit_forcing_response_sq(const MeridianMesh& mesh, int k, const SolverConfig& cfg = {});

// ---- stability and inf-sup ----

struct StabilityRow {
  int k = 0;
  double constant = 0.0;  ///< max over the data family of (||u|| + ||p||) / ||f||_{H^-1_(k)}
};

struct StabilityStudy {
  std::vector<StabilityRow> rows;
  double growth = 0.0;  ///< max_k constant / constant at the first k
};

StabilityStudy stability_study(const MeridianMesh& mesh, const std::vector<int>& ks, const SolverConfig& cfg = {});

struct InfSupRow {
  int k = 0;
  double h = 0.0;
  double beta = 0.0;
};

struct InfSupStudy {
  std::vector<InfSupRow> rows;
  double level_spread = 0.0;  ///< max over k of (max - min) / max across refinements
  double k_spread = 0.0;      ///< max over levels of (max - min) / max across k
};

InfSupStudy inf_sup_study(const MeridianMesh& coarse, int levels, const std::vector<int>& ks,
                          const SolverConfig& cfg = {});

// ---- solver consistency ----

/// Max relative difference between the solution at -k (conjugated data) and the conjugate of
/// the solution at k.
double conjugation_defect(const ManufacturedCase& c, const MeridianMesh& mesh, const SolverConfig& cfg = {});

/// Max relative difference between the complex solve and the split real solve at k = 0.
double decoupling_defect(const ManufacturedCase& c, const MeridianMesh& mesh, const SolverConfig& cfg = {});

// ---- norm identities ----

/// Per-mode norm evaluators; a test double can replace either to exercise failure reporting.
struct ModeNormEngine {
  std::function<NormReport(const MeridianMesh&, const VectorModeFn&, const QuadratureRule&)> vector =
      [](const MeridianMesh& m, const VectorModeFn& v, const QuadratureRule& r) { return vector_mode_norm(m, v, r); };
  std::function<NormReport(const MeridianMesh&, const ScalarModeFn&, int, const QuadratureRule&)> scalar =
      [](const MeridianMesh& m, const ScalarModeFn& q, int k, const QuadratureRule& r) {
        return scalar_mode_norm(m, q, k, r);
      };
};

/// Squared 3D norms of a reconstructed field by triangle rule x trapezoid in theta.
struct Norms3D {
  double velocity_l2_sq = 0.0;
  double velocity_h1_semi_sq = 0.0;
  double pressure_l2_sq = 0.0;
};

Norms3D tensor_norms(const MeridianMesh& mesh, const FnStack& stack, int n_theta,
                     const QuadratureRule& rule = rule_degree10());

/// Admissible closed-form vector mode at wavenumber k: random smooth coefficients times the
/// axis factors required by k.
VectorModeFn random_admissible_mode(int k, unsigned seed);
ScalarModeFn random_scalar_mode(unsigned seed);

/// Random trigonometric-polynomial field with the given modes.
FnStack random_trig_field(const std::vector<int>& ks, unsigned seed);

struct IsometryOptions {
  double tolerance = 1e-8;
  ModeNormEngine engine;
};

/// L^2 (scalar and vector), H^1 and H^1-seminorm decomposition checks of one field.
CheckSummary isometry_checks(const std::string& label, const MeridianMesh& mesh, const FnStack& field,
                             const IsometryOptions& opt = {});

/// ||v||^2_(k) = 1/2 ||v_r + i v_theta||^2_(k+1) + 1/2 ||v_r - i v_theta||^2_(k-1) + ||v_z||^2_(k).
double polarization_defect(const MeridianMesh& mesh, const VectorModeFn& v, const ModeNormEngine& engine = {});

struct EquivalenceRange {
  int k = 0;
  double min_ratio = 0.0;  ///< min of ||v|| / ||v||_* over the sample
  double max_ratio = 0.0;
};

EquivalenceRange equivalence_range(const MeridianMesh& mesh, int k, int samples, unsigned seed,
                                   const ModeNormEngine& engine = {});

/// ||v|| / ||v||_* for v = (phi, i sigma phi, 0) with sigma = -sign(k) (upper family, ratio
/// above one) or sigma = sign(k) (lower family, ratio below one).
double equivalence_family_ratio(const MeridianMesh& mesh, int k, bool upper, const ModeNormEngine& engine = {});

/// Angular-derivative identity: sum_{l <= s} of 3D H^1 norms of the field's l-th angular
/// derivative against the weighted per-mode sum. Returns the relative defect.
double angular_derivative_defect(const MeridianMesh& mesh, const FnStack& field, int s);

struct VerifyOptions {
  std::optional<double> tolerance;  ///< replaces the tolerance of every identity-defect check
  ModeNormEngine engine;
  int fields = 10;
  unsigned seed = 2024;
  double h = 0.25;
};

/// Full property suite: isometries on two domains, polarization, norm equivalence, angular
/// derivatives, dual-norm consistency, divergence alarm and conjugation symmetry of norms.
CheckSummary run_property_suite(const VerifyOptions& opt = {});

}  // namespace axistokes
