#include "axistokes/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "axistokes/basis.hpp"
#include "axistokes/norms.hpp"

namespace axistokes {

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Mat3 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i] += m[i][j] * v[j];
  return out;
}

void check_angular_resolution(int k_max, int n_theta) {
  if (!is_power_of_two(n_theta))
    throw AliasingError("n_theta = " + std::to_string(n_theta) + " is not a power of two");
  const int need = 4 * std::abs(k_max) + 2;
  if (n_theta < need)
    throw AliasingError("n_theta = " + std::to_string(n_theta) + " aliases wavenumber " + std::to_string(k_max) +
                        " (need at least " + std::to_string(need) + ")");
}

int default_n_theta(int k_max) {
  int n = 8;
  while (n < 4 * std::abs(k_max) + 2) n *= 2;
  return n;
}

std::vector<double> angular_nodes(int n_theta) {
  std::vector<double> t(static_cast<std::size_t>(n_theta));
  for (int j = 0; j < n_theta; ++j) t[static_cast<std::size_t>(j)] = -std::numbers::pi + 2.0 * std::numbers::pi * (j + 1) / n_theta;
  return t;
}

Vec3 coefficient_at(const CartesianField& field, int k, int n_theta, double r, double z) {
  const double w = 2.0 * std::numbers::pi / n_theta * inv_sqrt_2pi;
  Vec3 acc{};
  for (double th : angular_nodes(n_theta)) {
    const Vec3 cyl = mat_vec(rotation(-th), field(r, th, z));
    const cplx e = std::polar(w, -k * th);
    for (int c = 0; c < 3; ++c) acc[c] += cyl[c] * e;
  }
  return acc;
}

cplx scalar_coefficient_at(const ScalarField3& field, int k, int n_theta, double r, double z) {
  const double w = 2.0 * std::numbers::pi / n_theta * inv_sqrt_2pi;
  cplx acc{};
  for (double th : angular_nodes(n_theta)) acc += field(r, th, z) * std::polar(w, -k * th);
  return acc;
}

VectorModeFn extract_coefficient(const CartesianField& field, int k, int n_theta) {
  check_angular_resolution(k, n_theta);
  VectorModeFn v;
  v.k = k;
  for (int c = 0; c < 3; ++c)
    v.c[c] = ScalarModeFn::closed_form(
        [field, k, n_theta, c](double r, double z) { return coefficient_at(field, k, n_theta, r, z)[c]; });
  return v;
}

ScalarModeFn extract_scalar_coefficient(const ScalarField3& field, int k, int n_theta) {
  check_angular_resolution(k, n_theta);
  return ScalarModeFn::closed_form(
      [field, k, n_theta](double r, double z) { return scalar_coefficient_at(field, k, n_theta, r, z); });
}

void FourierStack::mirror_conjugates() {
  std::map<int, ModeField> mirrored;
  for (const auto& [k, f] : modes)
    if (k > 0) mirrored[-k] = ModeField{-k, f.u.conjugate(), f.p.conjugate()};
  for (auto& [k, f] : mirrored) modes[k] = std::move(f);
}

double FourierStack::conjugate_symmetry_defect() const {
  double d = 0.0;
  for (const auto& [k, f] : modes) {
    if (k <= 0) continue;
    const auto it = modes.find(-k);
    if (it == modes.end()) return std::numeric_limits<double>::infinity();
    d = std::max(d, (it->second.u.conjugate() - f.u).cwiseAbs().maxCoeff());
    d = std::max(d, (it->second.p.conjugate() - f.p).cwiseAbs().maxCoeff());
  }
  return d;
}

namespace {

template <class ModeValue>
Reconstruction accumulate(const std::map<int, ModeValue>& modes, double theta,
                          const std::function<bool(const ModeValue&, Vec3&, cplx&)>& value) {
  Reconstruction out;
  const Mat3 R = rotation(theta);
  for (const auto& [k, m] : modes) {
    Vec3 u{};
    cplx p{};
    if (!value(m, u, p)) return {};
    const cplx e = std::polar(inv_sqrt_2pi, k * theta);
    const Vec3 cart = mat_vec(R, u);
    for (int c = 0; c < 3; ++c) out.u[c] += cart[c] * e;
    out.p += p * e;
  }
  return out;
}

}  // namespace

Reconstruction reconstruct(const FourierStack& stack, const MeridianMesh& mesh, double r, double theta, double z) {
  return accumulate<ModeField>(stack.modes, theta, [&](const ModeField& f, Vec3& u, cplx& p) {
    return f.evaluate(mesh, r, z, u, p);
  });
}

Reconstruction reconstruct_at_vertex(const FourierStack& stack, std::size_t v, double theta) {
  return accumulate<ModeField>(stack.modes, theta, [v](const ModeField& f, Vec3& u, cplx& p) {
    for (int c = 0; c < 3; ++c) u[c] = f.u[static_cast<Eigen::Index>(vdof(v, c))];
    p = f.p[static_cast<Eigen::Index>(v)];
    return true;
  });
}

Reconstruction reconstruct(const FnStack& stack, double r, double theta, double z) {
  Reconstruction out;
  const Mat3 R = rotation(theta);
  for (const auto& [k, v] : stack.velocity) {
    const cplx e = std::polar(inv_sqrt_2pi, k * theta);
    const Vec3 cart = mat_vec(R, Vec3{v.c[0](r, z), v.c[1](r, z), v.c[2](r, z)});
    for (int c = 0; c < 3; ++c) out.u[c] += cart[c] * e;
  }
  for (const auto& [k, q] : stack.pressure) out.p += q(r, z) * std::polar(inv_sqrt_2pi, k * theta);
  return out;
}

double anisotropic_norm(const std::map<int, double>& mode_norms, double s) {
  double acc = 0.0;
  for (const auto& [k, n] : mode_norms) acc += std::pow(1.0 + double(k) * k, s) * n * n;
  return std::sqrt(acc);
}

std::map<int, double> velocity_mode_norms(const FourierStack& stack, const MeridianMesh& mesh) {
  std::map<int, double> out;
  for (const auto& [k, f] : stack.modes) out[k] = vector_mode_norm(mesh, f.velocity_fn(mesh)).h1k();
  return out;
}

double angular_derivative_norm_sq(const std::map<int, double>& mode_norms, int s) {
  if (s < 0) throw std::invalid_argument("derivative order must be nonnegative");
  double acc = 0.0;
  for (const auto& [k, n] : mode_norms) {
    double w = 0.0, kp = 1.0;
    for (int l = 0; l <= s; ++l) {
      w += kp;
      kp *= double(k) * k;
    }
    acc += w * n * n;
  }
  return acc;
}

void write_stack(const FourierStack& stack, const MeridianMesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream meta(dir / "stack.meta");
    if (!meta) throw std::runtime_error("cannot write " + (dir / "stack.meta").string());
    meta << "N " << stack.N << "\nreal_data " << (stack.real_data ? 1 : 0) << "\nmesh_id " << mesh.id()
         << "\nvertices " << mesh.num_vertices() << "\nmodes";
    for (const auto& [k, f] : stack.modes) meta << ' ' << k;
    meta << '\n';
  }
  write_mesh(mesh, dir / "mesh.txt");
  const std::size_t nv = mesh.num_vertices();
  const auto& edges = mesh.edges();
  for (const auto& [k, f] : stack.modes) {
    const auto path = dir / ("mode_" + std::to_string(k) + ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "dof_index,re_ur,im_ur,re_utheta,im_utheta,re_uz,im_uz,re_p,im_p\n" << std::setprecision(17);
    const std::size_t nodes = static_cast<std::size_t>(f.u.size()) / 3;
    for (std::size_t n = 0; n < nodes; ++n) {
      out << n;
      for (int c = 0; c < 3; ++c) {
        const cplx v = f.u[static_cast<Eigen::Index>(vdof(n, c))];
        out << ',' << v.real() << ',' << v.imag();
      }
      // P1 pressure at midside nodes is the mean of the edge endpoints
      const cplx p = n < nv ? f.p[static_cast<Eigen::Index>(n)]
                            : 0.5 * (f.p[static_cast<Eigen::Index>(edges[n - nv][0])] +
                                     f.p[static_cast<Eigen::Index>(edges[n - nv][1])]);
      out << ',' << p.real() << ',' << p.imag() << '\n';
    }
  }
}

FourierStack read_stack(const std::filesystem::path& dir, MeridianMesh& mesh_out) {
  std::ifstream meta(dir / "stack.meta");
  if (!meta) throw std::runtime_error("cannot read " + (dir / "stack.meta").string());
  FourierStack s;
  std::vector<int> ks;
  std::size_t nv = 0;
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream in(line);
    std::string key;
    in >> key;
    if (key == "N")
      in >> s.N;
    else if (key == "real_data") {
      int b = 0;
      in >> b;
      s.real_data = b != 0;
    } else if (key == "mesh_id")
      in >> s.mesh_id;
    else if (key == "vertices")
      in >> nv;
    else if (key == "modes")
      for (int k; in >> k;) ks.push_back(k);
  }
  mesh_out = read_mesh(dir / "mesh.txt");
  if (mesh_out.id() != s.mesh_id)
    throw std::runtime_error("stack mesh id " + s.mesh_id + " does not match mesh.txt (" + mesh_out.id() + ")");
  nv = mesh_out.num_vertices();
  const std::size_t nodes = num_p2_nodes(mesh_out);
  for (int k : ks) {
    const auto path = dir / ("mode_" + std::to_string(k) + ".csv");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    ModeField f{k, VecC::Zero(static_cast<Eigen::Index>(3 * nodes)), VecC::Zero(static_cast<Eigen::Index>(nv))};
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      std::size_t n = 0;
      double v[8];
      row >> n;
      for (double& x : v) row >> x;
      if (!row || n >= nodes) throw std::runtime_error(path.string() + ": malformed row " + std::to_string(rows + 2));
      for (int c = 0; c < 3; ++c) f.u[static_cast<Eigen::Index>(vdof(n, c))] = cplx(v[2 * c], v[2 * c + 1]);
      if (n < nv) f.p[static_cast<Eigen::Index>(n)] = cplx(v[6], v[7]);
      ++rows;
    }
    if (rows != nodes) throw std::runtime_error(path.string() + ": expected " + std::to_string(nodes) + " rows");
    s.modes[k] = std::move(f);
  }
  return s;
}

}  // namespace axistokes
