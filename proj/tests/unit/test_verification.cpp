#include <doctest.h>

#include <cmath>

#include "axistokes/verification.hpp"

using namespace axistokes;

TEST_CASE("check summary formatting and aggregation") {
  CheckSummary s;
  s.at_most("a", 1e-12, 1e-10);
  s.at_least("b", 0.5, 1.0);
  CHECK(s.checks.size() == 2);
  CHECK(s.checks[0].pass);
  CHECK_FALSE(s.checks[1].pass);
  CHECK_FALSE(s.all_pass());
  CHECK(format_check(s.checks[0]).rfind("CHECK a PASS", 0) == 0);
  CHECK(format_check(s.checks[1]).rfind("CHECK b FAIL", 0) == 0);
}

TEST_CASE("property suite passes with default tolerances") {
  VerifyOptions opt;
  opt.fields = 2;
  const CheckSummary s = run_property_suite(opt);
  for (const auto& c : s.checks) CHECK_MESSAGE(c.pass, format_check(c));
}

TEST_CASE("zero tolerance makes identity checks fail") {
  VerifyOptions opt;
  opt.fields = 1;
  opt.tolerance = 0.0;
  CHECK_FALSE(run_property_suite(opt).all_pass());
}

TEST_CASE("corrupted seminorm engine fails exactly the seminorm checks") {
  const MeridianMesh mesh = mesh_domain(unit_square(0.25));
  IsometryOptions opt;
  opt.engine.vector = [](const MeridianMesh& m, const VectorModeFn& v, const QuadratureRule& r) {
    NormReport rep = vector_mode_norm(m, v, r);
    rep.h1k_semi_sq *= 1.01;
    return rep;
  };
  const CheckSummary s = isometry_checks("field", mesh, random_trig_field({0, 1, 2}, 5), opt);
  for (const auto& c : s.checks) {
    const bool semi = c.name == "field.h1_semi";
    CHECK_MESSAGE(c.pass != semi, format_check(c));
  }
}

TEST_CASE("analytic truncation rates") {
  SUBCASE("s = 0 tail decays like N^-1/2") {
    const TruncationTable t = truncation_study({0.0, std::nullopt}, {8, 16, 32, 64});
    CHECK(t.slope == doctest::Approx(-0.5).epsilon(0.1));
  }
  SUBCASE("finite family has zero tail past its last mode") {
    const TruncationTable t = truncation_study({1.0, 4}, {2, 4, 8});
    CHECK(t.rows[0].tail > 0.0);
    CHECK(t.rows[1].tail == 0.0);
    CHECK(t.rows[2].tail == 0.0);
  }
  SUBCASE("cap below the needed cutoff throws") {
    TruncationOptions opt;
    opt.k_max_cap = 8;
    CHECK_THROWS_AS(truncation_study({0.5, std::nullopt}, {2, 4, 8}, opt), TruncationError);
  }
  SUBCASE("csv layout") {
    const TruncationTable t = truncation_study({2.0, std::nullopt}, {2, 4});
    CHECK(TruncationTable::csv_header() == "N,tail,bound_ratio");
    CHECK(t.csv().find("2,") != std::string::npos);
  }
}

TEST_CASE("convergence study on a discretely exact case") {
  const MeridianMesh coarse = mesh_domain(unit_square(0.5));
  const ConvergenceTable t = convergence_study(builtin_case("exact_k0"), coarse, 3);
  REQUIRE(t.rows.size() == 3);
  for (const auto& row : t.rows) {
    CHECK(row.err_u <= 1e-9);
    CHECK(row.err_p <= 1e-9);
  }
  // (2n+1)^2 P2 nodes: the growth per refinement tends to 4 from below
  double prev = 0.0;
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    const double growth = double(t.rows[i].velocity_dofs) / double(t.rows[i - 1].velocity_dofs);
    CHECK(growth > prev);
    CHECK(growth < 4.0);
    prev = growth;
  }
  CHECK(prev > 3.5);
}

TEST_CASE("solved truncation rate depends on the data, not the domain") {
  SolveStudyOptions opt;
  opt.k_max_cap = 64;
  const DecayFamily family{2.0, std::nullopt};
  const std::vector<int> N{2, 4, 8};
  const TruncationTable sq = truncation_study_with_solves(family, N, mesh_domain(unit_square(0.25)), opt);
  const TruncationTable ls = truncation_study_with_solves(family, N, mesh_domain(l_shape(0.25)), opt);
  CHECK(std::abs(sq.slope - ls.slope) <= 0.2);
}

TEST_CASE("solver consistency defects are at roundoff") {
  const MeridianMesh mesh = mesh_domain(unit_square(0.25));
  CHECK(conjugation_defect(builtin_case("smooth_k1"), mesh) <= 1e-10);
  CHECK(decoupling_defect(builtin_case("smooth_k0"), mesh) <= 1e-10);
}
