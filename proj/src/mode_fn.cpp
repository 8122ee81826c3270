#include "axistokes/mode_fn.hpp"

namespace axistokes {

ScalarModeFn ScalarModeFn::closed_form(PointFn value, PointFn d_r, PointFn d_z) {
  if (!value) throw std::invalid_argument("closed-form mode function needs a value evaluator");
  ScalarModeFn f;
  f.value_ = std::move(value);
  f.d_r_ = std::move(d_r);
  f.d_z_ = std::move(d_z);
  return f;
}

ScalarModeFn ScalarModeFn::on_mesh(ElementFn eval) {
  if (!eval) throw std::invalid_argument("element mode function needs an evaluator");
  ScalarModeFn f;
  f.element_ = std::move(eval);
  return f;
}

ScalarModeFn ScalarModeFn::zero() {
  auto z = [](double, double) { return cplx{}; };
  return closed_form(z, z, z);
}

ModeSample ScalarModeFn::sample(std::size_t tri, const std::array<double, 3>& bary, double r,
                                double z, bool with_derivatives) const {
  if (element_) return element_(tri, bary, r, z);
  if (!value_) throw std::logic_error("sampling an empty mode function");
  ModeSample s;
  s.value = value_(r, z);
  if (with_derivatives) {
    if (!d_r_ || !d_z_) throw std::logic_error("mode function has no derivative evaluators");
    s.d_r = d_r_(r, z);
    s.d_z = d_z_(r, z);
  }
  return s;
}

cplx ScalarModeFn::operator()(double r, double z) const {
  if (value_) return value_(r, z);
  throw std::logic_error("pointwise evaluation needs a closed-form mode function");
}

ScalarModeFn ScalarModeFn::combine(cplx a, const ScalarModeFn& x, cplx b, const ScalarModeFn& y) {
  if (x.is_closed_form() && y.is_closed_form()) {
    auto lin = [a, b](const PointFn& fx, const PointFn& fy) -> PointFn {
      if (!fx || !fy) return {};
      return [a, b, fx, fy](double r, double z) { return a * fx(r, z) + b * fy(r, z); };
    };
    return closed_form(lin(x.value_, y.value_), lin(x.d_r_, y.d_r_), lin(x.d_z_, y.d_z_));
  }
  return on_mesh([a, b, x, y](std::size_t t, const std::array<double, 3>& l, double r, double z) {
    const ModeSample sx = x.sample(t, l, r, z);
    const ModeSample sy = y.sample(t, l, r, z);
    return ModeSample{a * sx.value + b * sy.value, a * sx.d_r + b * sy.d_r, a * sx.d_z + b * sy.d_z};
  });
}

VectorModeFn VectorModeFn::zero(int k) {
  return VectorModeFn{{ScalarModeFn::zero(), ScalarModeFn::zero(), ScalarModeFn::zero()}, k};
}

}  // namespace axistokes
