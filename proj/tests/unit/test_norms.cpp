#include <doctest.h>

#include <cmath>
#include <random>

#include "axistokes/norms.hpp"

using namespace axistokes;

namespace {

const cplx I{0.0, 1.0};

MeridianMesh unit_square(double h = 0.25) { return generate_structured(DomainSpec::rectangle(0, 1, 0, 1, h)); }

ScalarModeFn poly(std::function<cplx(double, double)> f, std::function<cplx(double, double)> fr,
                  std::function<cplx(double, double)> fz) {
  return ScalarModeFn::closed_form(std::move(f), std::move(fr), std::move(fz));
}

ScalarModeFn const_fn(cplx c) {
  return poly([c](double, double) { return c; }, [](double, double) { return cplx{}; },
              [](double, double) { return cplx{}; });
}

ScalarModeFn r_times(cplx c) {
  return poly([c](double r, double) { return c * r; }, [c](double, double) { return c; },
              [](double, double) { return cplx{}; });
}

// Random field r^m * (a + b r + c z + d r z) e^{...}: smooth, vanishing on the axis to order m.
ScalarModeFn random_field(std::mt19937& gen, int m) {
  std::normal_distribution<double> n(0.0, 1.0);
  const cplx a{n(gen), n(gen)}, b{n(gen), n(gen)}, c{n(gen), n(gen)}, d{n(gen), n(gen)};
  const double w = n(gen);
  auto base = [=](double r, double z) { return (a + b * r + c * z + d * r * z) * std::exp(w * z); };
  auto base_r = [=](double r, double z) { return (b + d * z) * std::exp(w * z); };
  auto base_z = [=](double r, double z) { return (c + d * r + w * (a + b * r + c * z + d * r * z)) * std::exp(w * z); };
  return poly([=](double r, double z) { return std::pow(r, m) * base(r, z); },
              [=](double r, double z) {
                return (m == 0 ? 0.0 : m * std::pow(r, m - 1)) * base(r, z) + std::pow(r, m) * base_r(r, z);
              },
              [=](double r, double z) { return std::pow(r, m) * base_z(r, z); });
}

}  // namespace

TEST_CASE("integrate_weighted closed-form values") {
  const auto m = unit_square();
  CHECK(integrate_weighted(m, [](double r, double) { return cplx(r); }, 1).real() == doctest::Approx(1.0 / 3));
  CHECK(integrate_weighted(m, [](double, double) { return cplx(1.0); }, 1).real() == doctest::Approx(0.5));
  CHECK(integrate_weighted(m, [](double r, double) { return cplx(r); }, -1).real() == doctest::Approx(1.0));
  CHECK(integrate_weighted(m, [](double, double) { return cplx{}; }, -1) == cplx{});
  CHECK(integrate_weighted(m, [](double, double z) { return cplx(z); }, 0).real() == doctest::Approx(0.5));
  CHECK_THROWS(integrate_weighted(m, [](double, double) { return cplx{}; }, 2));
}

TEST_CASE("scalar mode norm examples") {
  const auto m = unit_square();
  const auto one = scalar_mode_norm(m, const_fn(1.0), 0);
  CHECK(one.h1k_sq == doctest::Approx(0.5).epsilon(1e-13));

  const auto q_r = scalar_mode_norm(m, r_times(1.0), 2);
  CHECK(q_r.l2_1_sq == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(q_r.h1_1_semi_sq == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(q_r.l2_m1_sq == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(q_r.h1k_sq == doctest::Approx(11.0 / 4).epsilon(1e-13));
  CHECK(q_r.v1_1_sq == doctest::Approx(1.0).epsilon(1e-13));

  const auto q_z = scalar_mode_norm(
      m, poly([](double, double z) { return cplx(z); }, [](double, double) { return cplx{}; },
              [](double, double) { return cplx(1.0); }),
      0);
  CHECK(q_z.l2_1_sq == doctest::Approx(1.0 / 6).epsilon(1e-13));
  CHECK(q_z.h1k_sq == doctest::Approx(2.0 / 3).epsilon(1e-13));
}

TEST_CASE("missing derivatives are reported") {
  const auto m = unit_square();
  const auto f = ScalarModeFn::closed_form([](double r, double) { return cplx(r); });
  CHECK_THROWS_AS(scalar_mode_norm(m, f, 0), std::logic_error);
  VectorModeFn v{{f, f, f}, 1};
  CHECK_THROWS_AS(vector_mode_norm(m, v), std::logic_error);
}

TEST_CASE("vector mode norm examples") {
  const auto m = unit_square();
  for (int k : {-3, 0, 1, 2, 7}) {
    const auto z = vector_mode_norm(m, VectorModeFn::zero(k));
    CHECK(z.h1k_sq == 0.0);
    CHECK(z.h1k_semi_sq == 0.0);
  }
  const VectorModeFn v1{{r_times(1.0), r_times(I), ScalarModeFn::zero()}, 1};
  CHECK(vector_mode_norm(m, v1).h1k_sq == doctest::Approx(1.5).epsilon(1e-13));

  const VectorModeFn v3{{r_times(1.0), ScalarModeFn::zero(), ScalarModeFn::zero()}, 3};
  const auto rep = vector_mode_norm(m, v3);
  CHECK(rep.h1k_sq == doctest::Approx(23.0 / 4).epsilon(1e-13));
  CHECK(rep.h1k_star_sq == doctest::Approx(0.25 + 0.5 + 9 * 0.5).epsilon(1e-13));
  CHECK(std::isnan(vector_mode_norm(m, v1).h1k_star_sq));
}

TEST_CASE("k = 0 vector norm groups V11 x V11 x H11") {
  const auto m = unit_square();
  const VectorModeFn v{{r_times(1.0), r_times(2.0), const_fn(3.0)}, 0};
  const auto rep = vector_mode_norm(m, v);
  // L2: (1 + 4)/4 + 9/2; V11 parts: (1 + 4)(1/2 + 1/2); H11 semi of v_z: 0
  CHECK(rep.h1k_sq == doctest::Approx(5.0 / 4 + 4.5 + 5.0).epsilon(1e-13));
  CHECK(rep.h1k_semi_sq == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("conjugate mode has the same norm at -k") {
  std::mt19937 gen(3);
  const auto m = unit_square(0.5);
  for (int k : {1, 2, 4}) {
    const auto a = random_field(gen, 1), b = random_field(gen, 1), c = random_field(gen, 1);
    VectorModeFn v{{a, b, c}, k};
    auto conj = [](const ScalarModeFn& f) {
      return ScalarModeFn::closed_form([f](double r, double z) { return std::conj(f(r, z)); },
                                       [f](double r, double z) { return std::conj(f.sample(0, {}, r, z).d_r); },
                                       [f](double r, double z) { return std::conj(f.sample(0, {}, r, z).d_z); });
    };
    VectorModeFn w{{conj(a), conj(b), conj(c)}, -k};
    CHECK(vector_mode_norm(m, v).h1k_sq == doctest::Approx(vector_mode_norm(m, w).h1k_sq).epsilon(1e-12));
  }
}

TEST_CASE("norm report invariants on random admissible fields") {
  std::mt19937 gen(11);
  const auto m = unit_square(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 6;
    VectorModeFn v{{random_field(gen, 1), random_field(gen, 1), random_field(gen, 1)}, k};
    const auto rep = vector_mode_norm(m, v);
    CHECK(rep.h1k_sq >= rep.h1k_semi_sq);
    CHECK(0.5 * rep.h1k_star() <= rep.h1k());
    CHECK(rep.h1k() <= 1.5 * rep.h1k_star());
    CHECK(rep.h1k_semi_sq == doctest::Approx(rep.h1k_sq - rep.l2_1_sq));
  }
}

TEST_CASE("csv row layout") {
  NormReport rep;
  rep.k = 2;
  rep.l2_1_sq = 0.25;
  rep.h1k_star_sq = 1.0;
  CHECK(NormReport::csv_header() == "k,l2_1_sq,l2_m1_sq,h1_1_semi_sq,h1k_sq,h1k_semi_sq,h1k_star_sq");
  CHECK(rep.csv_row() == "2,0.25,0,0,0,0,1");
}

TEST_CASE("divergence alarm separates admissible from inadmissible fields") {
  const auto m = unit_square(0.5);
  auto norm_of = [](const ScalarModeFn& q, int k) {
    return [q, k](const MeridianMesh& mesh) { return scalar_mode_norm(mesh, q, k).h1k_sq; };
  };
  const auto bad = divergence_alarm(m, norm_of(const_fn(1.0), 2));
  CHECK(bad.diverging);
  const auto good = divergence_alarm(m, norm_of(r_times(1.0), 2));
  CHECK_FALSE(good.diverging);
  std::mt19937 gen(5);
  const auto smooth = divergence_alarm(m, norm_of(random_field(gen, 1), 3));
  CHECK_FALSE(smooth.diverging);
}
