#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "starmod/rng.hpp"

namespace starmod {

class AlgElement;

inline constexpr double kDefaultTol = 1e-9;

// A finite-dimensional C*-algebra: a direct sum of full complex matrix
// blocks M_{n_1} + ... + M_{n_K}, carried together with a faithful trace
// tau(a) = sum_k c_k * tr(a_k).  The element basis used everywhere is the
// matrix-unit basis, blocks in order, entries row-major within a block.
class CStarAlgebra {
public:
  CStarAlgebra() = default;
  CStarAlgebra(std::vector<int> block_dims, std::vector<double> trace_weights);

  const std::vector<int>& block_dims() const { return block_dims_; }
  const std::vector<double>& trace_weights() const { return trace_weights_; }
  int num_blocks() const { return static_cast<int>(block_dims_.size()); }

  // Complex dimension sum(n_k^2).
  int dim() const { return dim_; }

  // Offset of block k's coordinates in the element basis.
  int block_offset(int k) const { return offsets_[k]; }

  bool commutative() const;
  bool same_as(const CStarAlgebra& other) const;

  AlgElement zero() const;
  AlgElement identity() const;
  // Matrix-unit basis element for flat index idx in [0, dim()).
  AlgElement basis_element(int idx) const;
  // Index of the adjoint of basis element idx (e_ij -> e_ji within a block).
  int basis_adjoint_index(int idx) const;

  AlgElement from_coords(const Eigen::VectorXcd& coords) const;
  Eigen::VectorXcd coords(const AlgElement& a) const;

  std::complex<double> trace(const AlgElement& a) const;

  AlgElement random_element(RngStream& rng) const;
  AlgElement random_hermitian(RngStream& rng) const;
  AlgElement random_positive(RngStream& rng) const;   // b* b
  AlgElement random_unitary(RngStream& rng) const;    // Haar-ish via QR

private:
  std::vector<int> block_dims_;
  std::vector<double> trace_weights_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

CStarAlgebra make_algebra(std::vector<int> block_dims,
                          std::vector<double> trace_weights);

// A block-diagonal complex matrix, the element of a CStarAlgebra.  Elements
// are plain values: arithmetic needs only the block shapes, while trace and
// basis coordinates live on the algebra.
class AlgElement {
public:
  AlgElement() = default;
  explicit AlgElement(std::vector<Eigen::MatrixXcd> blocks)
      : blocks_(std::move(blocks)) {}

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const Eigen::MatrixXcd& block(int k) const { return blocks_[k]; }
  Eigen::MatrixXcd& block(int k) { return blocks_[k]; }
  const std::vector<Eigen::MatrixXcd>& blocks() const { return blocks_; }

  bool shape_matches(const AlgElement& other) const;
  bool shape_matches(const CStarAlgebra& algebra) const;

  AlgElement adjoint() const;
  AlgElement conj() const;

  AlgElement operator+(const AlgElement& rhs) const;
  AlgElement operator-(const AlgElement& rhs) const;
  AlgElement operator-() const;
  AlgElement operator*(const AlgElement& rhs) const;  // block-wise product
  AlgElement operator*(std::complex<double> scalar) const;
  AlgElement& operator+=(const AlgElement& rhs);

  // Frobenius norm over all blocks; cheap sanity metric, not the C*-norm.
  double frobenius_norm() const;

private:
  std::vector<Eigen::MatrixXcd> blocks_;
};

inline AlgElement operator*(std::complex<double> s, const AlgElement& a) {
  return a * s;
}

// C*-norm: max over blocks of the largest singular value.
double op_norm(const AlgElement& a);

// Hermitian within tol*(1+norm) and all eigenvalues >= -tol*(1+norm).
bool is_positive(const AlgElement& a, double tol = kDefaultTol);

// Positive square root via block-wise Hermitian spectral decomposition;
// eigenvalues below zero are clamped (ties resolve toward positivity).
AlgElement sqrt_positive(const AlgElement& a, double tol = kDefaultTol);

// Eigenvalues of the Hermitian part, all blocks pooled, ascending.
std::vector<double> hermitian_eigenvalues(const AlgElement& a);

// The K block-indicator projections spanning the center Z(A).
std::vector<AlgElement> center_basis(const CStarAlgebra& algebra);

// Witness pair (x, y) with ||xx*+yy*|| = 1 and ||x*x+y*y|| = 2, built from
// matrix units in the first block of size >= 2.  Errors with
// CommutativeAlgebra when every block is 1x1.
std::pair<AlgElement, AlgElement> akemann_witness(const CStarAlgebra& algebra);

// A state phi(a) = tau(density * a) given by a positive density normalized
// against the algebra trace.
class StateFunctional {
public:
  StateFunctional(const CStarAlgebra& algebra, AlgElement density,
                  double tol = kDefaultTol);

  const CStarAlgebra& algebra() const { return algebra_; }
  const AlgElement& density() const { return density_; }
  std::complex<double> operator()(const AlgElement& a) const;
  bool is_tracial(double tol = kDefaultTol) const;

private:
  CStarAlgebra algebra_;
  AlgElement density_;
};

StateFunctional trace_state(const CStarAlgebra& algebra);

// A unital subalgebra B of A cut out by a pinching pattern: each block is
// split into consecutive diagonal sub-blocks, and sub-blocks carrying the
// same label are identified (they must have equal size).  B is the direct
// sum of one matrix block per label.
struct BlockPartition {
  struct Part {
    int dim = 0;
    int label = 0;
  };
  std::vector<std::vector<Part>> parts;  // one list per algebra block

  static BlockPartition identity(const CStarAlgebra& algebra);
  static BlockPartition diagonal(const CStarAlgebra& algebra);
};

// The tau-preserving conditional expectation A -> B for a pinching pattern:
// off-pattern entries are zeroed and identified sub-blocks are averaged with
// trace weights.  Unital, positive, idempotent onto B, B-bimodular.
class ConditionalExpectation {
public:
  ConditionalExpectation(CStarAlgebra source, BlockPartition partition);

  const CStarAlgebra& source() const { return source_; }
  const CStarAlgebra& target() const { return target_; }
  const BlockPartition& partition() const { return partition_; }

  AlgElement apply(const AlgElement& a) const;           // A -> B
  AlgElement embed(const AlgElement& b) const;           // B -> A
  AlgElement apply_embedded(const AlgElement& a) const;  // A -> B inside A

private:
  struct Slot {
    int block;   // algebra block index
    int offset;  // start row/col within the block
    int dim;
    double weight;  // trace weight of the containing block
  };
  CStarAlgebra source_;
  CStarAlgebra target_;
  BlockPartition partition_;
  std::vector<std::vector<Slot>> slots_;  // per label
};

ConditionalExpectation conditional_expectation(const CStarAlgebra& algebra,
                                               const BlockPartition& partition);

// Superoperators of multiplication in the element basis:
// coords(a * x) = left_mult_superop(A, a) * coords(x), and likewise on the
// right.
Eigen::MatrixXcd left_mult_superop(const CStarAlgebra& algebra,
                                   const AlgElement& a);
Eigen::MatrixXcd right_mult_superop(const CStarAlgebra& algebra,
                                    const AlgElement& a);

// Row vector t with tau(x) = t . coords(x).
Eigen::RowVectorXcd trace_functional(const CStarAlgebra& algebra);

}  // namespace starmod
