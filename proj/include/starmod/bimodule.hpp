#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "starmod/algebra.hpp"

namespace starmod {

class StarBimodule;

// A coordinate vector in a bimodule's chosen basis.  Elements remember their
// owner so cross-module arithmetic is rejected instead of silently mixing
// coordinates.
class ModuleElement {
public:
  ModuleElement() = default;
  ModuleElement(std::shared_ptr<const struct BimoduleData> owner,
                Eigen::VectorXcd coords)
      : owner_(std::move(owner)), coords_(std::move(coords)) {}

  const Eigen::VectorXcd& coords() const { return coords_; }
  Eigen::VectorXcd& coords() { return coords_; }
  const std::shared_ptr<const struct BimoduleData>& owner() const {
    return owner_;
  }

  ModuleElement operator+(const ModuleElement& rhs) const;
  ModuleElement operator-(const ModuleElement& rhs) const;
  ModuleElement operator*(std::complex<double> s) const;

private:
  std::shared_ptr<const struct BimoduleData> owner_;
  Eigen::VectorXcd coords_;
};

inline ModuleElement operator*(std::complex<double> s, const ModuleElement& x) {
  return x * s;
}

// Structure tensors of a finite-dimensional *-bimodule over a block algebra.
//
// The pairing <.,.> : E x E -> A is stored and extended C-BILINEARLY; the
// sesquilinear left/right inner products are derived through the involution
// (<x,y>_l = <x, y*>, <x,y>_r = <x*, y>).  Mixing the bilinear pairing with
// the sesquilinear products is the main implementation hazard here, so the
// axiom checker exercises bilinearity explicitly.
//
// The antilinear involution is stored as a complex matrix S acting on
// conjugated coordinates: star(x) = S * conj(x).
struct BimoduleData {
  CStarAlgebra algebra;
  int dim = 0;
  std::vector<Eigen::MatrixXcd> left_action;   // one d x d matrix per algebra basis index
  std::vector<Eigen::MatrixXcd> right_action;  // same shape
  std::vector<std::vector<AlgElement>> pairing;  // pairing[i][j] = <e_i, e_j>
  Eigen::MatrixXcd involution;                 // S

  // Flat caches, one row per basis pair (i*dim + j), one column per algebra
  // coordinate.
  Eigen::MatrixXcd pairing_flat;  // coords(<e_i, e_j>)
  Eigen::MatrixXcd ql_flat;       // coords(<e_i, e_j>_l)
  Eigen::MatrixXcd qr_flat;       // coords(<e_i, e_j>_r)
  // scalarizations tau(<e_i, e_j>_l / _r); Hermitian PSD
  Eigen::MatrixXcd gram_l;
  Eigen::MatrixXcd gram_r;
};

struct AxiomCheck {
  std::string axiom;     // which identity was tested
  double residual = 0.0;
  bool pass = true;
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  double tol = 0.0;
  bool pass = true;
  double max_residual() const;
  const AxiomCheck* worst() const;
};

class StarBimodule {
public:
  StarBimodule() = default;

  // Runs the full axiom suite; throws AxiomViolation naming the failed
  // identity when any residual exceeds tol.
  static StarBimodule make(CStarAlgebra algebra,
                           std::vector<Eigen::MatrixXcd> left_action,
                           std::vector<Eigen::MatrixXcd> right_action,
                           std::vector<std::vector<AlgElement>> pairing,
                           Eigen::MatrixXcd involution,
                           double tol = kDefaultTol);

  int dim() const { return data_->dim; }
  const CStarAlgebra& algebra() const { return data_->algebra; }
  const std::shared_ptr<const BimoduleData>& data() const { return data_; }
  bool same_as(const StarBimodule& other) const { return data_ == other.data_; }

  ModuleElement element(Eigen::VectorXcd coords) const;
  ModuleElement basis_element(int i) const;
  ModuleElement zero() const;
  ModuleElement random_element(RngStream& rng) const;

  ModuleElement act_left(const AlgElement& a, const ModuleElement& x) const;
  ModuleElement act_right(const ModuleElement& x, const AlgElement& a) const;
  ModuleElement star(const ModuleElement& x) const;

  // the bilinear A-valued pairing
  AlgElement pair(const ModuleElement& x, const ModuleElement& y) const;
  // derived sesquilinear inner products
  AlgElement inner_l(const ModuleElement& x, const ModuleElement& y) const;
  AlgElement inner_r(const ModuleElement& x, const ModuleElement& y) const;

  double seminorm_l(const ModuleElement& x) const;
  double seminorm_r(const ModuleElement& x) const;
  double norm_m(const ModuleElement& x) const;

  // matrices of the action of a fixed algebra element
  Eigen::MatrixXcd left_matrix(const AlgElement& a) const;
  Eigen::MatrixXcd right_matrix(const AlgElement& a) const;
  const Eigen::MatrixXcd& involution_matrix() const { return data_->involution; }
  const Eigen::MatrixXcd& gram_l() const { return data_->gram_l; }
  const Eigen::MatrixXcd& gram_r() const { return data_->gram_r; }
  const AlgElement& pairing_entry(int i, int j) const {
    return data_->pairing[i][j];
  }

  // block Gram of the sesquilinear product: the (d*n_k)^2 Hermitian matrix
  // per algebra block whose positivity is axiom (c)
  std::vector<Eigen::MatrixXcd> block_gram_l() const;
  std::vector<Eigen::MatrixXcd> block_gram_r() const;

  void check_owner(const ModuleElement& x) const;

private:
  explicit StarBimodule(std::shared_ptr<const BimoduleData> data)
      : data_(std::move(data)) {}
  std::shared_ptr<const BimoduleData> data_;
};

// Runs every Definition-1 axiom, bilinearity, and the action laws without
// throwing; make() is this plus a throw on failure.
AxiomReport verify_axioms(const BimoduleData& data, double tol = kDefaultTol);
AxiomReport verify_axioms(const StarBimodule& module, double tol = kDefaultTol);

// Orthonormal basis of N = {x : ||x||_m = 0}, computed as the kernel of the
// scalar PSD Gram tau(<.,.>_l) + tau(<.,.>_r); tau faithful makes this exact.
std::vector<Eigen::VectorXcd> null_space(const StarBimodule& module,
                                         double tol = kDefaultTol);

struct QuotientResult {
  StarBimodule module;        // E/N
  Eigen::MatrixXcd project;   // q : E -> E/N coordinates (dim' x dim)
  Eigen::MatrixXcd section;   // isometric section E/N -> E (dim x dim')
};

QuotientResult quotient_by_null(const StarBimodule& module,
                                double tol = kDefaultTol);

// Real basis of E_sa = {x : x* = x}; real dimension equals dim when the
// involution is a genuine antilinear involution.
std::vector<ModuleElement> selfadjoint_basis(const StarBimodule& module,
                                             double tol = kDefaultTol);

enum class OperatorSide { Left, Right };

// An adjointable module operator.  Left operators commute with the left
// action and are adjointable for <.,.>_l; right operators mirror this with
// the right action and <.,.>_r.
struct ModuleOperator {
  StarBimodule module;
  OperatorSide side = OperatorSide::Left;
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd adjoint_matrix;
};

ModuleOperator make_left_operator(const StarBimodule& module,
                                  const Eigen::MatrixXcd& matrix,
                                  double tol = kDefaultTol);
ModuleOperator make_right_operator(const StarBimodule& module,
                                   const Eigen::MatrixXcd& matrix,
                                   double tol = kDefaultTol);

// T-hat(x) = (T x*)*; swaps sides, is involutive, and reverses composition
// in the module-operator product.
ModuleOperator op_hat(const ModuleOperator& op);

// max of the two ratio suprema sup ||Tx||_s / ||x||_s (s = l, r) in the
// trace-scalarized seminorm metrics, null directions removed first; 0/0
// counts as 0 and T mapping a null vector out of the null space gives +inf.
double op_norm_def4(const StarBimodule& module, const Eigen::MatrixXcd& matrix,
                    double tol = kDefaultTol);
double op_norm_def4(const ModuleOperator& op, double tol = kDefaultTol);

// a -> L_a (right-linear) and a -> R_a (left-linear) with adjoints L_{a*},
// R_{a*}.
ModuleOperator left_rep(const StarBimodule& module, const AlgElement& a);
ModuleOperator right_rep(const StarBimodule& module, const AlgElement& a);

}  // namespace starmod
