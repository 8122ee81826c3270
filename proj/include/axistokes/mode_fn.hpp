#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace axistokes {

using cplx = std::complex<double>;

struct ModeSample {
  cplx value{};
  cplx d_r{};
  cplx d_z{};
};

/// A single Fourier coefficient q^k(r, z).
///
/// Two backings: closed-form evaluators of (r, z), or an element evaluator that also
/// receives the triangle index and barycentric point (used for FEM fields, whose
/// derivatives are only defined elementwise).
class ScalarModeFn {
 public:
  using PointFn = std::function<cplx(double r, double z)>;
  using ElementFn =
      std::function<ModeSample(std::size_t tri, const std::array<double, 3>& bary, double r, double z)>;

  ScalarModeFn() = default;

  static ScalarModeFn closed_form(PointFn value, PointFn d_r = {}, PointFn d_z = {});
  static ScalarModeFn on_mesh(ElementFn eval);
  static ScalarModeFn zero();

  /// Samples at a point; throws std::logic_error if derivatives are requested but absent.
  ModeSample sample(std::size_t tri, const std::array<double, 3>& bary, double r, double z,
                    bool with_derivatives = true) const;
  cplx operator()(double r, double z) const;

  bool has_derivatives() const { return element_ || (d_r_ && d_z_); }
  bool is_closed_form() const { return static_cast<bool>(value_); }

  /// a*x + b*y; both inputs must be evaluable wherever the result is sampled.
  static ScalarModeFn combine(cplx a, const ScalarModeFn& x, cplx b, const ScalarModeFn& y);

 private:
  PointFn value_, d_r_, d_z_;
  ElementFn element_;
};

/// Cylindrical-component coefficient triple (v_r, v_theta, v_z) at wavenumber k.
struct VectorModeFn {
  std::array<ScalarModeFn, 3> c;
  int k = 0;

  const ScalarModeFn& r() const { return c[0]; }
  const ScalarModeFn& theta() const { return c[1]; }
  const ScalarModeFn& z() const { return c[2]; }

  static VectorModeFn zero(int k);
};

}  // namespace axistokes
