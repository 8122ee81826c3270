#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "axistokes/config.hpp"
#include "axistokes/driver.hpp"
#include "axistokes/vtk.hpp"

using namespace axistokes;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kBreakdown = 2, kConfigError = 3 };

struct Globals {
  std::string config_path;
  unsigned jobs = 1;
  bool deterministic = false;
  bool with_solves = false;
  std::optional<double> tolerance;

  unsigned worker_count() const { return deterministic ? 1u : std::max(1u, jobs); }
};

RunConfig config_from(const Globals& g) {
  if (g.config_path.empty()) return parse_config("");
  return load_config(g.config_path);
}

int cmd_solve(const Globals& g) {
  const RunConfig cfg = config_from(g);
  const MeridianMesh mesh = cfg.build_mesh();
  const SolveSummary s = run_solve(cfg, mesh, g.worker_count());
  const std::string report = format_summary(s);
  std::cout << report;

  std::filesystem::create_directories(cfg.output_dir);
  for (const auto& fmt : cfg.formats) {
    if (fmt == "stack") {
      write_stack(s.stack, mesh, cfg.output_dir / "stack");
      std::cout << "wrote " << (cfg.output_dir / "stack").string() << '\n';
    } else if (fmt == "vtk") {
      export_vtk(s.stack, mesh, cfg.vtk_n_theta, cfg.output_dir / "field.vtk");
      std::cout << "wrote " << (cfg.output_dir / "field.vtk").string() << '\n';
    }
  }
  std::ofstream(cfg.output_dir / "summary.txt") << report;
  return kOk;
}

int cmd_verify(const Globals& g) {
  RunConfig cfg = config_from(g);
  if (g.tolerance) cfg.verify.tolerance = g.tolerance;
  const CheckSummary s = run_property_suite(cfg.verify);
  std::cout << s.format();
  const bool ok = s.all_pass();
  std::cout << (ok ? "verify PASS" : "verify FAIL") << '\n';
  return ok ? kOk : kVerifyFailed;
}

int cmd_truncation(const Globals& g) {
  const RunConfig cfg = config_from(g);
  TruncationTable t;
  if (g.with_solves) {
    const MeridianMesh mesh = cfg.domain || cfg.mesh_path ? cfg.build_mesh() : mesh_domain(unit_square(1.0 / 16));
    SolveStudyOptions opt;
    opt.solver = cfg.solver;
    opt.jobs = g.worker_count();
    opt.k_max_cap = cfg.truncation_k_max_cap;
    t = truncation_study_with_solves(cfg.family, cfg.truncation_N, mesh, opt);
  } else {
    t = truncation_study(cfg.family, cfg.truncation_N);
  }
  std::cout << t.csv();
  std::cerr << "s " << t.s << " slope " << t.slope << " fitted_slope " << t.fitted_slope << " bound_spread "
            << t.bound_spread << " k_max " << t.k_max << '\n';
  return kOk;
}

int cmd_norms(const Globals& g, const std::string& stack_dir) {
  std::filesystem::path dir = stack_dir;
  if (dir.empty()) dir = config_from(g).output_dir / "stack";
  MeridianMesh mesh;
  const FourierStack stack = read_stack(dir, mesh);
  const std::map<int, double> vn = velocity_mode_norms(stack, mesh);
  double p_sq = 0.0;
  for (const auto& [k, f] : stack.modes) {
    const double pn = scalar_mode_norm(mesh, f.pressure_fn(mesh), k).l2_1();
    p_sq += pn * pn;
    std::cout << "mode " << k << " |u|_H1k " << vn.at(k) << " |p|_L2 " << pn << '\n';
  }
  for (int s = 0; s <= 2; ++s) std::cout << "anisotropic velocity norm s=" << s << ' ' << anisotropic_norm(vn, s) << '\n';
  std::cout << "pressure L2 norm " << std::sqrt(p_sq) << '\n';
  if (stack.real_data) std::cout << "conjugate symmetry defect " << stack.conjugate_symmetry_defect() << '\n';
  return kOk;
}

void print_mesh_info(const MeridianMesh& mesh) {
  std::size_t gamma = 0, axis = 0;
  for (const auto& e : mesh.boundary_edges()) (e.tag == BoundaryTag::Gamma0 ? axis : gamma)++;
  std::cout << "vertices " << mesh.num_vertices() << "\ntriangles " << mesh.num_triangles() << "\nboundary edges "
            << gamma << " wall, " << axis << " axis\narea " << mesh.total_area() << "\nh " << mesh.max_edge_length()
            << "\nid " << mesh.id() << '\n';
}

int cmd_mesh_generate(const Globals& g, const std::string& output) {
  const MeridianMesh mesh = config_from(g).build_mesh();
  print_mesh_info(mesh);
  if (!output.empty()) {
    write_mesh(mesh, output);
    std::cout << "wrote " << output << '\n';
  }
  return kOk;
}

int cmd_mesh_inspect(const std::string& path) {
  print_mesh_info(read_mesh(path));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Axisymmetric Stokes solver by azimuthal Fourier modes"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "INI run configuration")->check(CLI::ExistingFile);
  app.add_option("--jobs", g.jobs, "worker threads for mode solves")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", g.deterministic, "single worker and fixed reduction order");
  app.add_flag("--with-solves", g.with_solves, "truncation study from per-mode FEM solves");
  app.add_option("--tolerance", g.tolerance, "override the identity-check tolerance of verify");

  auto* solve = app.add_subcommand("solve", "solve every mode and write the Fourier stack");
  auto* verify = app.add_subcommand("verify", "run the norm-identity property suite");
  auto* trunc = app.add_subcommand("truncation", "truncation-error study, CSV on stdout");
  auto* norms = app.add_subcommand("norms", "per-mode and anisotropic norms of a written stack");
  std::string stack_dir;
  norms->add_option("--stack", stack_dir, "stack directory (default: output dir of the config)");
  auto* mesh = app.add_subcommand("mesh", "generate or inspect meridian meshes");
  mesh->require_subcommand(1);
  auto* gen = mesh->add_subcommand("generate", "mesh the configured domain");
  std::string mesh_out;
  gen->add_option("--output,-o", mesh_out, "write the mesh in native format");
  auto* inspect = mesh->add_subcommand("inspect", "summarize a mesh file");
  std::string mesh_in;
  inspect->add_option("path", mesh_in, "mesh file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (solve->parsed()) return cmd_solve(g);
    if (verify->parsed()) return cmd_verify(g);
    if (trunc->parsed()) return cmd_truncation(g);
    if (norms->parsed()) return cmd_norms(g, stack_dir);
    if (gen->parsed()) return cmd_mesh_generate(g, mesh_out);
    if (inspect->parsed()) return cmd_mesh_inspect(mesh_in);
  } catch (const SolverBreakdown& e) {
    std::cerr << "solver breakdown: " << e.what() << '\n';
    return kBreakdown;
  } catch (const TruncationError& e) {
    std::cerr << "truncation: " << e.what() << '\n';
    return kBreakdown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
