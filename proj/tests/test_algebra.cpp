#include "starmod/algebra.hpp"

#include <cmath>

#include "doctest.h"
#include "starmod/error.hpp"
#include "starmod/rng.hpp"

using namespace starmod;

namespace {

CStarAlgebra m2() { return make_algebra({2}, {1.0}); }
CStarAlgebra m2_plus_c() { return make_algebra({2, 1}, {1.0, 2.0}); }
CStarAlgebra c3() { return make_algebra({1, 1, 1}, {1.0, 1.0, 1.0}); }

}  // namespace

TEST_CASE("make_algebra validates inputs") {
  CHECK(c3().dim() == 3);
  CHECK(m2().dim() == 4);
  CHECK(m2_plus_c().dim() == 5);
  CHECK_THROWS_WITH_AS(make_algebra({0}, {1.0}), doctest::Contains("NonPositiveDimension"),
                       Error);
  CHECK_THROWS_WITH_AS(make_algebra({2}, {-1.0}), doctest::Contains("NonPositiveWeight"),
                       Error);
}

TEST_CASE("op_norm is the max per-block spectral norm") {
  auto A = m2();
  AlgElement a = A.zero();
  a.block(0)(0, 1) = 2.0;
  CHECK(op_norm(a) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(op_norm(A.identity()) == doctest::Approx(1.0).epsilon(1e-12));

  auto B = m2_plus_c();
  AlgElement b = B.zero();
  b.block(0)(0, 0) = 1.0;
  b.block(0)(1, 1) = -3.0;
  b.block(1)(0, 0) = 2.0;
  CHECK(op_norm(b) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("is_positive") {
  auto A = m2();
  AlgElement ones = A.zero();
  ones.block(0) << 1.0, 1.0, 1.0, 1.0;
  CHECK(is_positive(ones));  // eigenvalues {0, 2}

  AlgElement nilpotent = A.zero();
  nilpotent.block(0)(0, 1) = 1.0;
  CHECK_FALSE(is_positive(nilpotent));  // not Hermitian

  CHECK_FALSE(is_positive(-A.identity()));
}

TEST_CASE("sqrt_positive") {
  auto A = m2();
  AlgElement d = A.zero();
  d.block(0)(0, 0) = 4.0;
  d.block(0)(1, 1) = 9.0;
  AlgElement r = sqrt_positive(d);
  CHECK(std::abs(r.block(0)(0, 0) - 2.0) < 1e-12);
  CHECK(std::abs(r.block(0)(1, 1) - 3.0) < 1e-12);

  AlgElement p = A.zero();
  p.block(0) << 5.0, 4.0, 4.0, 5.0;
  AlgElement rp = sqrt_positive(p);
  // oracle: square the candidate and compare
  CHECK(op_norm(rp * rp - p) < 1e-10);
  CHECK(std::abs(rp.block(0)(0, 0) - 2.0) < 1e-10);
  CHECK(std::abs(rp.block(0)(0, 1) - 1.0) < 1e-10);

  CHECK(op_norm(sqrt_positive(A.zero())) < 1e-12);
  CHECK_THROWS_WITH_AS(sqrt_positive(-A.identity()), doctest::Contains("NotPositive"),
                       Error);
}

TEST_CASE("sqrt_positive round trip on random positives") {
  auto A = m2_plus_c();
  RngStream rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    AlgElement a = A.random_positive(rng);
    AlgElement r = sqrt_positive(a);
    CHECK(is_positive(r, 1e-8));
    CHECK(op_norm(r * r - a) <= 1e-8 * (1.0 + op_norm(a)));
  }
}

TEST_CASE("C*-identity and trace properties on random elements") {
  for (const auto& A : {m2(), m2_plus_c(), c3()}) {
    RngStream rng(5);
    double min_weight = 1e300;
    for (double w : A.trace_weights()) min_weight = std::min(min_weight, w);
    for (int trial = 0; trial < 200; ++trial) {
      AlgElement a = A.random_element(rng);
      AlgElement b = A.random_element(rng);
      const double na = op_norm(a);
      CHECK(std::abs(op_norm(a.adjoint() * a) - na * na) <=
            1e-9 * (1.0 + na * na));
      // tau faithful: tau(a*a) dominates the Frobenius mass
      const double fa = a.frobenius_norm();
      CHECK(A.trace(a.adjoint() * a).real() >= min_weight * fa * fa - 1e-9);
      // tau symmetric
      CHECK(std::abs(A.trace(a * b) - A.trace(b * a)) <=
            1e-10 * (1.0 + op_norm(a) * op_norm(b)));
    }
  }
}

TEST_CASE("center_basis spans the center and commutes") {
  auto A = m2_plus_c();
  auto basis = center_basis(A);
  REQUIRE(basis.size() == 2);
  CHECK(op_norm(basis[0] * basis[0] - basis[0]) < 1e-14);
  CHECK(op_norm(basis[0] + basis[1] - A.identity()) < 1e-14);
  RngStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    AlgElement a = A.random_element(rng);
    for (const auto& q : basis)
      CHECK(op_norm(q * a - a * q) <= 1e-10 * (1.0 + op_norm(a)));
  }
  CHECK(center_basis(c3()).size() == 3);
  CHECK(center_basis(make_algebra({3}, {1.0})).size() == 1);
}

TEST_CASE("akemann_witness norms are 1 and 2") {
  for (const auto& A : {m2(), make_algebra({1, 2}, {1.0, 1.0}),
                        make_algebra({3}, {0.5})}) {
    auto [x, y] = akemann_witness(A);
    const double left = op_norm(x * x.adjoint() + y * y.adjoint());
    const double right = op_norm(x.adjoint() * x + y.adjoint() * y);
    CHECK(left == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(right == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(left - right) >= 0.5);
  }
  CHECK_THROWS_WITH_AS(akemann_witness(c3()), doctest::Contains("CommutativeAlgebra"),
                       Error);
}

TEST_CASE("states") {
  auto A = m2();
  auto tr = trace_state(A);
  CHECK(tr.is_tracial());
  CHECK(std::abs(tr(A.identity()) - 1.0) < 1e-12);

  AlgElement rho = A.zero();
  rho.block(0)(0, 0) = 0.9;
  rho.block(0)(1, 1) = 0.1;
  StateFunctional phi(A, rho);
  CHECK_FALSE(phi.is_tracial());
  AlgElement e11 = A.zero();
  e11.block(0)(0, 0) = 1.0;
  CHECK(std::abs(phi(e11) - 0.9) < 1e-12);

  CHECK_THROWS_WITH_AS(StateFunctional(A, -A.identity()), doctest::Contains("NotAState"),
                       Error);
  CHECK_THROWS_WITH_AS(StateFunctional(A, A.identity()), doctest::Contains("NotAState"),
                       Error);  // tau = 2, not normalized
}

TEST_CASE("conditional expectation onto the diagonal of M2") {
  auto A = m2();
  auto phi = conditional_expectation(A, BlockPartition::diagonal(A));
  CHECK(phi.target().dim() == 2);

  RngStream rng(11);
  AlgElement a = A.random_element(rng);
  AlgElement pa = phi.apply_embedded(a);
  CHECK(std::abs(pa.block(0)(0, 0) - a.block(0)(0, 0)) < 1e-14);
  CHECK(std::abs(pa.block(0)(0, 1)) < 1e-14);

  // idempotent, unital, tau-preserving, positive
  CHECK(op_norm(phi.apply_embedded(pa) - pa) < 1e-12);
  CHECK(op_norm(phi.apply_embedded(A.identity()) - A.identity()) < 1e-12);
  CHECK(std::abs(A.trace(pa) - A.trace(a)) < 1e-12);
  AlgElement pos = A.random_positive(rng);
  CHECK(is_positive(phi.apply_embedded(pos), 1e-9));

  // B-bimodular: phi(b1 a b2) = b1 phi(a) b2 for b1, b2 in B
  AlgElement b1 = phi.embed(phi.target().random_element(rng));
  AlgElement b2 = phi.embed(phi.target().random_element(rng));
  CHECK(op_norm(phi.apply_embedded(b1 * a * b2) - b1 * pa * b2) <
        1e-10 * (1.0 + op_norm(a)));
}

TEST_CASE("conditional expectation identity partition and scalar pinch") {
  auto A = m2();
  auto id = conditional_expectation(A, BlockPartition::identity(A));
  RngStream rng(7);
  AlgElement a = A.random_element(rng);
  CHECK(op_norm(id.apply_embedded(a) - a) < 1e-14);

  // both diagonal entries share one label -> scalars: phi(a) = (tr a / 2) I
  BlockPartition scalars;
  scalars.parts = {{{1, 0}, {1, 0}}};
  auto phi = conditional_expectation(A, scalars);
  CHECK(phi.target().dim() == 1);
  AlgElement pa = phi.apply_embedded(a);
  const std::complex<double> mean = a.block(0).trace() / 2.0;
  CHECK(std::abs(pa.block(0)(0, 0) - mean) < 1e-14);
  CHECK(std::abs(pa.block(0)(1, 1) - mean) < 1e-14);
  CHECK(op_norm(phi.apply_embedded(phi.apply_embedded(a)) - pa) < 1e-12);
  CHECK(op_norm(phi.apply_embedded(A.identity()) - A.identity()) < 1e-12);

  BlockPartition bad;
  bad.parts = {{{1, 0}}};
  CHECK_THROWS_WITH_AS(conditional_expectation(A, bad), doctest::Contains("InvalidPartition"),
                       Error);
}

TEST_CASE("rng streams are reproducible and named streams are independent") {
  RngStream a = RngStream::named(42, "task-a");
  RngStream a2 = RngStream::named(42, "task-a");
  RngStream b = RngStream::named(42, "task-b");
  const double va = a.normal();
  CHECK(va == a2.normal());
  CHECK(va != b.normal());
}
