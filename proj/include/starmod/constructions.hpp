#pragma once

#include <Eigen/Dense>
#include <vector>

#include "starmod/algebra.hpp"
#include "starmod/bimodule.hpp"

namespace starmod {

// GNS module of a state: module space A over the base algebra C, pairing
// phi(xy), involution the algebra adjoint.  The left and right seminorms
// coincide exactly when phi is tracial.
StarBimodule gns_bimodule(const CStarAlgebra& algebra,
                          const StateFunctional& phi,
                          double tol = kDefaultTol);

// Complexification of a real inner-product space: E = C^n over C with the
// bilinear extension of the Gram matrix and coordinatewise conjugation.
StarBimodule complexified_real_hilbert(const Eigen::MatrixXd& gram,
                                       double tol = kDefaultTol);

// H + H* with pairing (v1 + d1, v2 + d2) = d2(v1) and involution
// v + delta_w -> w + delta_v; the standard witness that the left and right
// seminorms can be wildly different.
StarBimodule hyperbolic_pair(int n, double tol = kDefaultTol);

// I tensor R^k for an ideal I = sum of selected blocks, pairing
// (a v, b w) -> <v,w> ab, involution (a v)* = a* v.
StarBimodule tensor_bimodule(const CStarAlgebra& algebra,
                             const std::vector<int>& ideal_blocks,
                             const Eigen::MatrixXd& h_gram,
                             double tol = kDefaultTol);

// A as a bimodule over B through a conditional expectation phi: A -> B,
// pairing phi(xy).
StarBimodule expectation_bimodule(const ConditionalExpectation& phi,
                                  double tol = kDefaultTol);

// A bundle of real inner-product fibers over a finite point set.
struct FellBundleFinite {
  int base_points = 0;
  std::vector<int> fiber_dims;              // one per point, may be 0
  std::vector<Eigen::MatrixXd> fiber_grams; // SPD where fiber_dim > 0
};

// Complexified section module of a finite bundle: pointwise actions of C^n,
// fiberwise bilinear pairing, conjugation of the imaginary part.  Satisfies
// the reality condition by construction.
StarBimodule fell_bundle_module(const FellBundleFinite& bundle,
                                double tol = kDefaultTol);

struct FellDecomposition {
  FellBundleFinite bundle;
  StarBimodule model;      // fell_bundle_module(bundle)
  Eigen::MatrixXcd iso;    // E coordinates -> model coordinates
  double residual = 0.0;   // worst intertwining/pairing/involution residual
};

// Converse of fell_bundle_module over a commutative base: extracts the fiber
// at each point as the image of E_sa under the point's indicator, with the
// Gram read from the pairing at that point.  Requires the reality condition
// (inner products of self-adjoint elements are self-adjoint); coincidence of
// the two actions follows from it and is verified.
FellDecomposition fell_decompose(const StarBimodule& module,
                                 double tol = kDefaultTol);

struct DirectSumModule {
  StarBimodule module;
  std::vector<AlgElement> projections;
  // global module-basis index of each (summand, algebra basis index within
  // the summand's blocks)
  std::vector<std::vector<int>> summand_basis;
  // algebra basis indices picked per summand (the blocks where p_i = 1)
  std::vector<std::vector<int>> summand_algebra_indices;
};

// E = direct sum of p_i M for central projections p_i, pairing
// <(+)a_i, (+)b_i> = sum a_i b_i, diagonal actions; centered and local.
DirectSumModule direct_sum_module(const CStarAlgebra& algebra,
                                  const std::vector<AlgElement>& projections,
                                  double tol = kDefaultTol);

}  // namespace starmod
