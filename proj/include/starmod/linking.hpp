#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "starmod/bimodule.hpp"

namespace starmod {

// F = A + E_r as a right Hilbert A-module, where E_r is E with the r-null
// directions quotiented out.  Carries the A-valued inner product
// <(b,y),(c,z)> = b*c + <y,z>_r and its trace scalarization, which is a
// positive-definite Hilbert inner product because tau is faithful.
struct LinkingSpace {
  CStarAlgebra algebra;
  StarBimodule module;       // the original E
  int er_dim = 0;
  Eigen::MatrixXcd er_basis; // dim(E) x er_dim, orthonormal lift of E_r
  Eigen::MatrixXcd tau_gram; // (d_A + er_dim)^2, Hermitian positive definite
  Eigen::MatrixXcd gram_sqrt;
  Eigen::MatrixXcd gram_sqrt_inv;

  int dim() const { return algebra.dim() + er_dim; }
};

LinkingSpace build_linking(const StarBimodule& module,
                           double tol = kDefaultTol);

// A right A-linear adjointable map on F in the linking basis.
struct LinkingOperator {
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd a_adjoint;  // module adjoint; equals the tau-metric adjoint
};

// phi(a)(b + y) = ab + ay: an isometric unital *-homomorphism A -> B(F).
LinkingOperator phi_map(const LinkingSpace& link, const AlgElement& a);

// psi(x)(b + y) = <x*, y>_r + xb: an isometric linear embedding E -> B(F).
LinkingOperator psi_map(const LinkingSpace& link, const ModuleElement& x);

// Right action of A on F (ba, ya); every linking operator commutes with it.
Eigen::MatrixXcd linking_right_action(const LinkingSpace& link,
                                      const AlgElement& a);

// Operator norm in B(F).  Computed as the spectral norm in the Hilbert
// inner product tau(<.,.>) on F.  This is exact, not an approximation: the
// action of B(F) on (F, tau(<.,.>)) is a *-representation (the module
// adjoint coincides with the metric adjoint), it is injective because tau
// is faithful and the inner product on F is nondegenerate, and an injective
// *-homomorphism of C*-algebras is isometric.
double bf_norm(const LinkingSpace& link, const Eigen::MatrixXcd& op);

// tau-metric adjoint G^{-1} T^H G.
Eigen::MatrixXcd bf_adjoint(const LinkingSpace& link,
                            const Eigen::MatrixXcd& op);

struct Theorem12Item {
  std::string name;
  double max_residual = 0.0;
  bool pass = true;
};

struct Theorem12Report {
  std::vector<Theorem12Item> items;
  double tol = 0.0;
  bool pass = true;
};

// Samples random elements and reports the residuals of: isometry of phi and
// psi, adjoint covariance, module covariance, right A-linearity, the unital
// pairing identity, and the C*-identity of the represented norms.
Theorem12Report verify_theorem12(const StarBimodule& module, RngStream& rng,
                                 int samples = 200, double tol = 1e-8);

}  // namespace starmod
