#include "starmod/constructions.hpp"

#include <cmath>

#include "doctest.h"
#include "starmod/error.hpp"

using namespace starmod;

namespace {

CStarAlgebra m2() { return make_algebra({2}, {1.0}); }

std::vector<int> all_blocks(const CStarAlgebra& a) {
  std::vector<int> v(a.num_blocks());
  for (int k = 0; k < a.num_blocks(); ++k) v[k] = k;
  return v;
}

Eigen::MatrixXd random_spd(int n, RngStream& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullU);
  Eigen::VectorXd eigs(n);
  for (int i = 0; i < n; ++i) eigs[i] = 0.5 + 1.5 * rng.uniform();
  return svd.matrixU() * eigs.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

TEST_CASE("GNS module seminorms depend on the state") {
  auto A = m2();
  AlgElement e12 = A.zero();
  e12.block(0)(0, 1) = 1.0;

  SUBCASE("tracial state: both seminorms are 1/sqrt(2)") {
    auto E = gns_bimodule(A, trace_state(A));
    ModuleElement x = E.element(A.coords(e12));
    CHECK(E.seminorm_l(x) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(E.seminorm_r(x) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }

  SUBCASE("density diag(0.9, 0.1): seminorms sqrt(0.9) and sqrt(0.1)") {
    AlgElement rho = A.zero();
    rho.block(0)(0, 0) = 0.9;
    rho.block(0)(1, 1) = 0.1;
    auto E = gns_bimodule(A, StateFunctional(A, rho));
    ModuleElement x = E.element(A.coords(e12));
    CHECK(std::abs(E.seminorm_l(x) - std::sqrt(0.9)) < 1e-12);
    CHECK(std::abs(E.seminorm_r(x) - std::sqrt(0.1)) < 1e-12);
  }

  SUBCASE("the trivial line module over C") {
    CStarAlgebra c = make_algebra({1}, {1.0});
    auto E = gns_bimodule(c, trace_state(c));
    CHECK(E.dim() == 1);
    CHECK(E.seminorm_l(E.basis_element(0)) == doctest::Approx(1.0));
  }

  SUBCASE("tracial iff seminorms agree everywhere") {
    RngStream rng(31);
    AlgElement rho = A.zero();
    rho.block(0)(0, 0) = 0.7;
    rho.block(0)(1, 1) = 0.3;
    StateFunctional skew(A, rho);
    auto Et = gns_bimodule(A, trace_state(A));
    auto Es = gns_bimodule(A, skew);
    double max_gap_tracial = 0.0, max_gap_skew = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      ModuleElement x = Et.random_element(rng);
      ModuleElement y = Es.element(x.coords());
      max_gap_tracial = std::max(
          max_gap_tracial, std::abs(Et.seminorm_l(x) - Et.seminorm_r(x)));
      max_gap_skew =
          std::max(max_gap_skew, std::abs(Es.seminorm_l(y) - Es.seminorm_r(y)));
    }
    CHECK(max_gap_tracial < 1e-9);
    CHECK(max_gap_skew > 0.1);
  }
}

TEST_CASE("complexified real Hilbert space") {
  SUBCASE("bilinear versus sesquilinear on the line") {
    auto E = complexified_real_hilbert(Eigen::MatrixXd::Identity(1, 1));
    Eigen::VectorXcd ix(1);
    ix[0] = std::complex<double>(0.0, 1.0);
    ModuleElement x = E.element(ix);
    CHECK(std::abs(E.pair(x, x).block(0)(0, 0) - std::complex<double>(-1.0)) <
          1e-14);
    CHECK(std::abs(E.pair(x, E.star(x)).block(0)(0, 0) -
                   std::complex<double>(1.0)) < 1e-14);
  }

  SUBCASE("(1, i) against the identity Gram") {
    auto E = complexified_real_hilbert(Eigen::MatrixXd::Identity(2, 2));
    Eigen::VectorXcd v(2);
    v << 1.0, std::complex<double>(0.0, 1.0);
    ModuleElement x = E.element(v);
    CHECK(std::abs(E.pair(x, E.star(x)).block(0)(0, 0) -
                   std::complex<double>(2.0)) < 1e-14);
    CHECK(E.seminorm_l(x) == doctest::Approx(E.seminorm_r(x)).epsilon(1e-12));
  }

  SUBCASE("random Grams pass the axiom suite") {
    RngStream rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      auto E = complexified_real_hilbert(random_spd(3, rng));
      CHECK(verify_axioms(E).pass);
    }
  }

  CHECK_THROWS_WITH_AS(complexified_real_hilbert(-Eigen::MatrixXd::Identity(2, 2)),
                       doctest::Contains("NotPositiveDefinite"), Error);
}

TEST_CASE("hyperbolic pair seminorm asymmetry") {
  auto E = hyperbolic_pair(1);
  ModuleElement v0 = E.basis_element(0);  // v + 0
  CHECK(E.seminorm_l(v0) == doctest::Approx(1.0));
  CHECK(E.seminorm_r(v0) == doctest::Approx(0.0));
  ModuleElement d0 = E.basis_element(1);  // 0 + delta
  CHECK(E.seminorm_l(d0) == doctest::Approx(0.0));
  CHECK(E.seminorm_r(d0) == doctest::Approx(1.0));
  CHECK(verify_axioms(hyperbolic_pair(2)).pass);
}

TEST_CASE("tensor module") {
  auto A = m2();

  SUBCASE("k = 1 recovers the multiplication module with equal seminorms") {
    auto E = tensor_bimodule(A, all_blocks(A), Eigen::MatrixXd::Identity(1, 1));
    CHECK(E.dim() == 4);
    RngStream rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      ModuleElement x = E.random_element(rng);
      CHECK(std::abs(E.seminorm_l(x) - E.seminorm_r(x)) <=
            1e-9 * (1.0 + E.seminorm_l(x)));
    }
  }

  SUBCASE("k = 2 embeds the norm-asymmetry witnesses") {
    auto E = tensor_bimodule(A, all_blocks(A), Eigen::MatrixXd::Identity(2, 2));
    CHECK(E.dim() == 8);
    auto [xw, yw] = akemann_witness(A);
    // x = x_w (x) h1 + y_w (x) h2
    Eigen::VectorXcd coords = Eigen::VectorXcd::Zero(8);
    const Eigen::VectorXcd cx = A.coords(xw), cy = A.coords(yw);
    for (int a = 0; a < 4; ++a) {
      coords[2 * a] = cx[a];
      coords[2 * a + 1] = cy[a];
    }
    ModuleElement x = E.element(coords);
    // <x,x>_l = xx* + yy* (norm 1), <x,x>_r = x*x + y*y (norm 2)
    CHECK(E.seminorm_l(x) * E.seminorm_l(x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(E.seminorm_r(x) * E.seminorm_r(x) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(E.seminorm_l(x) - E.seminorm_r(x)) >= 0.2);
  }

  SUBCASE("proper ideal of a commutative sum") {
    CStarAlgebra c2 = make_algebra({1, 1}, {1.0, 1.0});
    auto E = tensor_bimodule(c2, {0}, Eigen::MatrixXd::Identity(1, 1));
    CHECK(E.dim() == 1);
    CHECK(verify_axioms(E).pass);
  }

  CHECK_THROWS_WITH_AS(tensor_bimodule(A, {}, Eigen::MatrixXd::Identity(1, 1)),
                       doctest::Contains("EmptyIdeal"), Error);
}

TEST_CASE("expectation module over the diagonal of M2") {
  auto A = m2();
  auto phi = conditional_expectation(A, BlockPartition::diagonal(A));
  auto E = expectation_bimodule(phi);
  CHECK(E.dim() == 4);
  CHECK(E.algebra().dim() == 2);

  AlgElement e12 = A.zero();
  e12.block(0)(0, 1) = 1.0;
  ModuleElement x = E.element(A.coords(e12));
  AlgElement il = E.inner_l(x, x);  // phi(e11) = first diagonal label
  AlgElement ir = E.inner_r(x, x);  // phi(e22)
  CHECK(std::abs(il.block(0)(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(il.block(1)(0, 0)) < 1e-14);
  CHECK(std::abs(ir.block(1)(0, 0) - 1.0) < 1e-14);

  // left and right actions differ: B is commutative but not central
  bool differ = false;
  for (int beta = 0; beta < E.algebra().dim(); ++beta) {
    const AlgElement b = E.algebra().basis_element(beta);
    if ((E.left_matrix(b) - E.right_matrix(b)).norm() > 1e-9) differ = true;
  }
  CHECK(differ);

  // identity expectation gives back the multiplication module
  auto id = conditional_expectation(A, BlockPartition::identity(A));
  auto Em = expectation_bimodule(id);
  CHECK(Em.algebra().dim() == 4);
  CHECK(verify_axioms(Em).pass);
}

TEST_CASE("fell bundle modules") {
  RngStream rng(11);

  SUBCASE("dims (1,0,2)") {
    FellBundleFinite b;
    b.base_points = 3;
    b.fiber_dims = {1, 0, 2};
    b.fiber_grams = {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd(),
                     random_spd(2, rng)};
    auto E = fell_bundle_module(b);
    CHECK(E.dim() == 3);
    CHECK(verify_axioms(E).pass);

    auto dec = fell_decompose(E);
    CHECK(dec.bundle.fiber_dims == std::vector<int>{1, 0, 2});
    CHECK(dec.residual < 1e-8);
  }

  SUBCASE("all fibers empty give the zero module") {
    FellBundleFinite b;
    b.base_points = 2;
    b.fiber_dims = {0, 0};
    b.fiber_grams = {Eigen::MatrixXd(), Eigen::MatrixXd()};
    auto E = fell_bundle_module(b);
    CHECK(E.dim() == 0);
  }

  SUBCASE("round trip recovers dims and Gram spectra") {
    for (int trial = 0; trial < 50; ++trial) {
      FellBundleFinite b;
      b.base_points = 1 + static_cast<int>(rng.below(5));
      for (int p = 0; p < b.base_points; ++p) {
        const int dim = static_cast<int>(rng.below(4));  // 0..3
        b.fiber_dims.push_back(dim);
        b.fiber_grams.push_back(dim ? random_spd(dim, rng) : Eigen::MatrixXd());
      }
      auto E = fell_bundle_module(b);
      auto dec = fell_decompose(E);
      REQUIRE(dec.bundle.fiber_dims == b.fiber_dims);
      CHECK(dec.residual < 1e-8);
      // recovered Grams are orthogonally congruent: same spectra
      for (int p = 0; p < b.base_points; ++p) {
        if (b.fiber_dims[p] == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(b.fiber_grams[p]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(dec.bundle.fiber_grams[p]);
        CHECK((e1.eigenvalues() - e2.eigenvalues()).norm() < 1e-8);
      }
    }
  }

  SUBCASE("multiplication module over C^2 decomposes with unit fibers") {
    CStarAlgebra c2 = make_algebra({1, 1}, {1.0, 1.0});
    auto E = tensor_bimodule(c2, {0, 1}, Eigen::MatrixXd::Identity(1, 1));
    auto dec = fell_decompose(E);
    CHECK(dec.bundle.fiber_dims == std::vector<int>{1, 1});
  }

  SUBCASE("hyperbolic pair fails the reality condition") {
    CHECK_THROWS_WITH_AS(fell_decompose(hyperbolic_pair(1)),
                         doctest::Contains("RealityConditionFails"), Error);
  }

  SUBCASE("noncommutative base is rejected") {
    auto E = tensor_bimodule(m2(), {0}, Eigen::MatrixXd::Identity(1, 1));
    CHECK_THROWS_WITH_AS(fell_decompose(E), doctest::Contains("NotCommutativeBase"),
                         Error);
  }
}

TEST_CASE("direct sum modules") {
  auto A = m2();

  SUBCASE("two unit projections give M + M") {
    auto ds = direct_sum_module(A, {A.identity(), A.identity()});
    CHECK(ds.module.dim() == 8);
    CHECK(verify_axioms(ds.module).pass);
  }

  SUBCASE("coordinate line of C^2") {
    CStarAlgebra c2 = make_algebra({1, 1}, {1.0, 1.0});
    AlgElement p = c2.zero();
    p.block(0)(0, 0) = 1.0;
    auto ds = direct_sum_module(c2, {p});
    CHECK(ds.module.dim() == 1);
  }

  SUBCASE("mixed projections over M2 + C") {
    CStarAlgebra a = make_algebra({2, 1}, {1.0, 2.0});
    auto q = center_basis(a);
    auto ds = direct_sum_module(a, {q[1], q[0] + q[1]});
    CHECK(ds.module.dim() == 1 + 5);
    CHECK(verify_axioms(ds.module).pass);
  }

  SUBCASE("non-central projection is rejected") {
    AlgElement e11 = A.zero();
    e11.block(0)(0, 0) = 1.0;
    CHECK_THROWS_WITH_AS(direct_sum_module(A, {e11}),
                         doctest::Contains("NotCentralProjection"), Error);
  }
}

TEST_CASE("every factory output passes the axiom suite on the test matrix") {
  std::vector<CStarAlgebra> algebras = {
      make_algebra({1}, {1.0}),          make_algebra({1, 1}, {1.0, 1.0}),
      make_algebra({1, 1, 1}, {1, 1, 1}), make_algebra({2}, {1.0}),
      make_algebra({2, 1}, {1.0, 2.0}),  make_algebra({3}, {0.5})};
  RngStream rng(101);
  for (const auto& A : algebras) {
    CHECK(verify_axioms(gns_bimodule(A, trace_state(A))).pass);
    CHECK(verify_axioms(tensor_bimodule(A, all_blocks(A),
                                        Eigen::MatrixXd::Identity(2, 2)))
              .pass);
    auto phi = conditional_expectation(A, BlockPartition::diagonal(A));
    CHECK(verify_axioms(expectation_bimodule(phi)).pass);
    auto qs = center_basis(A);
    CHECK(verify_axioms(direct_sum_module(A, {qs[0], A.identity()}).module).pass);
  }
}
