#include "starmod/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "starmod/error.hpp"

namespace starmod {

namespace {

void check_same_shape(const AlgElement& a, const AlgElement& b) {
  if (!a.shape_matches(b)) fail("ShapeMismatch", "block shapes differ");
}

}  // namespace

CStarAlgebra::CStarAlgebra(std::vector<int> block_dims,
                           std::vector<double> trace_weights)
    : block_dims_(std::move(block_dims)),
      trace_weights_(std::move(trace_weights)) {
  if (block_dims_.empty())
    fail("NonPositiveDimension", "algebra needs at least one block");
  if (block_dims_.size() != trace_weights_.size())
    fail("ShapeMismatch", "one trace weight per block required");
  offsets_.resize(block_dims_.size());
  dim_ = 0;
  for (std::size_t k = 0; k < block_dims_.size(); ++k) {
    if (block_dims_[k] < 1)
      fail("NonPositiveDimension", "block dimension must be >= 1");
    if (!(trace_weights_[k] > 0.0))
      fail("NonPositiveWeight", "trace weight must be > 0");
    offsets_[k] = dim_;
    dim_ += block_dims_[k] * block_dims_[k];
  }
}

bool CStarAlgebra::commutative() const {
  return std::all_of(block_dims_.begin(), block_dims_.end(),
                     [](int n) { return n == 1; });
}

bool CStarAlgebra::same_as(const CStarAlgebra& other) const {
  return block_dims_ == other.block_dims_ &&
         trace_weights_ == other.trace_weights_;
}

AlgElement CStarAlgebra::zero() const {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(block_dims_.size());
  for (int n : block_dims_) blocks.push_back(Eigen::MatrixXcd::Zero(n, n));
  return AlgElement(std::move(blocks));
}

AlgElement CStarAlgebra::identity() const {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(block_dims_.size());
  for (int n : block_dims_) blocks.push_back(Eigen::MatrixXcd::Identity(n, n));
  return AlgElement(std::move(blocks));
}

AlgElement CStarAlgebra::basis_element(int idx) const {
  AlgElement e = zero();
  for (int k = 0; k < num_blocks(); ++k) {
    const int n = block_dims_[k];
    if (idx < n * n) {
      e.block(k)(idx / n, idx % n) = 1.0;
      return e;
    }
    idx -= n * n;
  }
  fail("ShapeMismatch", "basis index out of range");
}

int CStarAlgebra::basis_adjoint_index(int idx) const {
  int base = 0;
  for (int k = 0; k < num_blocks(); ++k) {
    const int n = block_dims_[k];
    if (idx - base < n * n) {
      const int local = idx - base;
      return base + (local % n) * n + local / n;
    }
    base += n * n;
  }
  fail("ShapeMismatch", "basis index out of range");
}

AlgElement CStarAlgebra::from_coords(const Eigen::VectorXcd& coords) const {
  if (coords.size() != dim_) fail("ShapeMismatch", "coordinate length mismatch");
  AlgElement a = zero();
  for (int k = 0; k < num_blocks(); ++k) {
    const int n = block_dims_[k];
    const int off = offsets_[k];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a.block(k)(i, j) = coords[off + i * n + j];
  }
  return a;
}

Eigen::VectorXcd CStarAlgebra::coords(const AlgElement& a) const {
  if (!a.shape_matches(*this)) fail("ShapeMismatch", "element not in algebra");
  Eigen::VectorXcd v(dim_);
  for (int k = 0; k < num_blocks(); ++k) {
    const int n = block_dims_[k];
    const int off = offsets_[k];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v[off + i * n + j] = a.block(k)(i, j);
  }
  return v;
}

std::complex<double> CStarAlgebra::trace(const AlgElement& a) const {
  if (!a.shape_matches(*this)) fail("ShapeMismatch", "element not in algebra");
  std::complex<double> t = 0.0;
  for (int k = 0; k < num_blocks(); ++k)
    t += trace_weights_[k] * a.block(k).trace();
  return t;
}

AlgElement CStarAlgebra::random_element(RngStream& rng) const {
  AlgElement a = zero();
  for (int k = 0; k < num_blocks(); ++k) {
    const int n = block_dims_[k];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a.block(k)(i, j) = rng.normal_complex();
  }
  return a;
}

AlgElement CStarAlgebra::random_hermitian(RngStream& rng) const {
  AlgElement a = random_element(rng);
  return (a + a.adjoint()) * 0.5;
}

AlgElement CStarAlgebra::random_positive(RngStream& rng) const {
  AlgElement b = random_element(rng);
  return b.adjoint() * b;
}

AlgElement CStarAlgebra::random_unitary(RngStream& rng) const {
  AlgElement g = random_element(rng);
  AlgElement u = zero();
  for (int k = 0; k < num_blocks(); ++k) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g.block(k));
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity so the distribution does not depend on QR
    // internals.
    for (int j = 0; j < q.cols(); ++j) {
      std::complex<double> d = r(j, j);
      const double m = std::abs(d);
      q.col(j) *= (m > 0) ? d / m : 1.0;
    }
    u.block(k) = q;
  }
  return u;
}

CStarAlgebra make_algebra(std::vector<int> block_dims,
                          std::vector<double> trace_weights) {
  return CStarAlgebra(std::move(block_dims), std::move(trace_weights));
}

bool AlgElement::shape_matches(const AlgElement& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    if (blocks_[k].rows() != other.blocks_[k].rows()) return false;
  return true;
}

bool AlgElement::shape_matches(const CStarAlgebra& algebra) const {
  if (static_cast<int>(blocks_.size()) != algebra.num_blocks()) return false;
  for (int k = 0; k < algebra.num_blocks(); ++k)
    if (blocks_[k].rows() != algebra.block_dims()[k] ||
        blocks_[k].cols() != algebra.block_dims()[k])
      return false;
  return true;
}

AlgElement AlgElement::adjoint() const {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.adjoint());
  return AlgElement(std::move(out));
}

AlgElement AlgElement::conj() const {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.conjugate());
  return AlgElement(std::move(out));
}

AlgElement AlgElement::operator+(const AlgElement& rhs) const {
  check_same_shape(*this, rhs);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    out.push_back(blocks_[k] + rhs.blocks_[k]);
  return AlgElement(std::move(out));
}

AlgElement AlgElement::operator-(const AlgElement& rhs) const {
  check_same_shape(*this, rhs);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    out.push_back(blocks_[k] - rhs.blocks_[k]);
  return AlgElement(std::move(out));
}

AlgElement AlgElement::operator-() const {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(-b);
  return AlgElement(std::move(out));
}

AlgElement AlgElement::operator*(const AlgElement& rhs) const {
  check_same_shape(*this, rhs);
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    out.push_back(blocks_[k] * rhs.blocks_[k]);
  return AlgElement(std::move(out));
}

AlgElement AlgElement::operator*(std::complex<double> scalar) const {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(scalar * b);
  return AlgElement(std::move(out));
}

AlgElement& AlgElement::operator+=(const AlgElement& rhs) {
  check_same_shape(*this, rhs);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += rhs.blocks_[k];
  return *this;
}

double AlgElement::frobenius_norm() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return std::sqrt(s);
}

double op_norm(const AlgElement& a) {
  double m = 0.0;
  for (const auto& b : a.blocks()) {
    if (b.rows() == 1) {
      m = std::max(m, std::abs(b(0, 0)));
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b);
      m = std::max(m, svd.singularValues()[0]);
    }
  }
  return m;
}

std::vector<double> hermitian_eigenvalues(const AlgElement& a) {
  std::vector<double> eigs;
  for (const auto& b : a.blocks()) {
    Eigen::MatrixXcd h = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      eigs.push_back(es.eigenvalues()[i]);
  }
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

bool is_positive(const AlgElement& a, double tol) {
  const double scale = tol * (1.0 + op_norm(a));
  if (op_norm(a - a.adjoint()) > scale) return false;
  const auto eigs = hermitian_eigenvalues(a);
  return eigs.empty() || eigs.front() >= -scale;
}

AlgElement sqrt_positive(const AlgElement& a, double tol) {
  if (!is_positive(a, tol)) fail("NotPositive", "element is not positive");
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(a.blocks().size());
  for (const auto& b : a.blocks()) {
    Eigen::MatrixXcd h = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    out.push_back(es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                  es.eigenvectors().adjoint());
  }
  return AlgElement(std::move(out));
}

std::vector<AlgElement> center_basis(const CStarAlgebra& algebra) {
  std::vector<AlgElement> basis;
  basis.reserve(algebra.num_blocks());
  for (int k = 0; k < algebra.num_blocks(); ++k) {
    AlgElement q = algebra.zero();
    q.block(k) = Eigen::MatrixXcd::Identity(algebra.block_dims()[k],
                                            algebra.block_dims()[k]);
    basis.push_back(std::move(q));
  }
  return basis;
}

std::pair<AlgElement, AlgElement> akemann_witness(const CStarAlgebra& algebra) {
  for (int k = 0; k < algebra.num_blocks(); ++k) {
    if (algebra.block_dims()[k] >= 2) {
      AlgElement x = algebra.zero();
      AlgElement y = algebra.zero();
      x.block(k)(0, 1) = 1.0;  // e_12
      y.block(k)(1, 1) = 1.0;  // e_22
      return {x, y};
    }
  }
  fail("CommutativeAlgebra",
       "every block is 1x1; the norm asymmetry needs a noncommutative block");
}

StateFunctional::StateFunctional(const CStarAlgebra& algebra, AlgElement density,
                                 double tol)
    : algebra_(algebra), density_(std::move(density)) {
  if (!density_.shape_matches(algebra_))
    fail("ShapeMismatch", "density not in algebra");
  if (!is_positive(density_, tol)) fail("NotAState", "density is not positive");
  const std::complex<double> mass = algebra_.trace(density_);
  if (std::abs(mass - 1.0) > tol * (1.0 + std::abs(mass)))
    fail("NotAState", "density is not normalized: tau(density) != 1");
}

std::complex<double> StateFunctional::operator()(const AlgElement& a) const {
  return algebra_.trace(density_ * a);
}

bool StateFunctional::is_tracial(double tol) const {
  // phi(ab) = phi(ba) for all a, b iff the density is central.
  for (int k = 0; k < algebra_.num_blocks(); ++k) {
    const auto& b = density_.block(k);
    const int n = static_cast<int>(b.rows());
    const Eigen::MatrixXcd scalar =
        (b.trace() / static_cast<double>(n)) * Eigen::MatrixXcd::Identity(n, n);
    if ((b - scalar).norm() > tol * (1.0 + b.norm())) return false;
  }
  return true;
}

StateFunctional trace_state(const CStarAlgebra& algebra) {
  std::complex<double> total = algebra.trace(algebra.identity());
  AlgElement density = algebra.identity() * (1.0 / total);
  return StateFunctional(algebra, density);
}

BlockPartition BlockPartition::identity(const CStarAlgebra& algebra) {
  BlockPartition p;
  p.parts.resize(algebra.num_blocks());
  for (int k = 0; k < algebra.num_blocks(); ++k)
    p.parts[k].push_back({algebra.block_dims()[k], k});
  return p;
}

BlockPartition BlockPartition::diagonal(const CStarAlgebra& algebra) {
  BlockPartition p;
  p.parts.resize(algebra.num_blocks());
  int label = 0;
  for (int k = 0; k < algebra.num_blocks(); ++k)
    for (int i = 0; i < algebra.block_dims()[k]; ++i)
      p.parts[k].push_back({1, label++});
  return p;
}

ConditionalExpectation::ConditionalExpectation(CStarAlgebra source,
                                               BlockPartition partition)
    : source_(std::move(source)), partition_(std::move(partition)) {
  if (static_cast<int>(partition_.parts.size()) != source_.num_blocks())
    fail("InvalidPartition", "one part list per algebra block required");

  std::map<int, int> label_dim;
  std::map<int, std::vector<Slot>> label_slots;
  for (int k = 0; k < source_.num_blocks(); ++k) {
    int off = 0;
    for (const auto& part : partition_.parts[k]) {
      if (part.dim < 1) fail("InvalidPartition", "sub-block dimension < 1");
      auto [it, inserted] = label_dim.emplace(part.label, part.dim);
      if (!inserted && it->second != part.dim)
        fail("InvalidPartition", "identified sub-blocks must have equal size");
      label_slots[part.label].push_back(
          {k, off, part.dim, source_.trace_weights()[k]});
      off += part.dim;
    }
    if (off != source_.block_dims()[k])
      fail("InvalidPartition", "sub-block dimensions must fill the block");
  }

  std::vector<int> target_dims;
  std::vector<double> target_weights;
  slots_.clear();
  for (const auto& [label, dim] : label_dim) {
    double weight = 0.0;
    for (const auto& slot : label_slots[label]) weight += slot.weight;
    target_dims.push_back(dim);
    target_weights.push_back(weight);
    slots_.push_back(label_slots[label]);
  }
  target_ = CStarAlgebra(std::move(target_dims), std::move(target_weights));
}

AlgElement ConditionalExpectation::apply(const AlgElement& a) const {
  if (!a.shape_matches(source_)) fail("ShapeMismatch", "element not in source");
  AlgElement b = target_.zero();
  for (std::size_t l = 0; l < slots_.size(); ++l) {
    Eigen::MatrixXcd avg =
        Eigen::MatrixXcd::Zero(slots_[l][0].dim, slots_[l][0].dim);
    double total = 0.0;
    for (const auto& slot : slots_[l]) {
      avg += slot.weight *
             a.block(slot.block).block(slot.offset, slot.offset, slot.dim,
                                       slot.dim);
      total += slot.weight;
    }
    b.block(static_cast<int>(l)) = avg / total;
  }
  return b;
}

AlgElement ConditionalExpectation::embed(const AlgElement& b) const {
  if (!b.shape_matches(target_)) fail("ShapeMismatch", "element not in target");
  AlgElement a = source_.zero();
  for (std::size_t l = 0; l < slots_.size(); ++l)
    for (const auto& slot : slots_[l])
      a.block(slot.block).block(slot.offset, slot.offset, slot.dim, slot.dim) =
          b.block(static_cast<int>(l));
  return a;
}

AlgElement ConditionalExpectation::apply_embedded(const AlgElement& a) const {
  return embed(apply(a));
}

ConditionalExpectation conditional_expectation(const CStarAlgebra& algebra,
                                               const BlockPartition& partition) {
  return ConditionalExpectation(algebra, partition);
}

namespace {

// Row-major vectorization satisfies vec(A X B) = (A kron B^T) vec(X).
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Eigen::MatrixXcd left_mult_superop(const CStarAlgebra& algebra,
                                   const AlgElement& a) {
  if (!a.shape_matches(algebra)) fail("ShapeMismatch", "element not in algebra");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(algebra.dim(), algebra.dim());
  for (int k = 0; k < algebra.num_blocks(); ++k) {
    const int n = algebra.block_dims()[k];
    const int off = algebra.block_offset(k);
    m.block(off, off, n * n, n * n) =
        kron(a.block(k), Eigen::MatrixXcd::Identity(n, n));
  }
  return m;
}

Eigen::MatrixXcd right_mult_superop(const CStarAlgebra& algebra,
                                    const AlgElement& a) {
  if (!a.shape_matches(algebra)) fail("ShapeMismatch", "element not in algebra");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(algebra.dim(), algebra.dim());
  for (int k = 0; k < algebra.num_blocks(); ++k) {
    const int n = algebra.block_dims()[k];
    const int off = algebra.block_offset(k);
    m.block(off, off, n * n, n * n) =
        kron(Eigen::MatrixXcd::Identity(n, n), a.block(k).transpose());
  }
  return m;
}

Eigen::RowVectorXcd trace_functional(const CStarAlgebra& algebra) {
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(algebra.dim());
  for (int k = 0; k < algebra.num_blocks(); ++k) {
    const int n = algebra.block_dims()[k];
    const int off = algebra.block_offset(k);
    for (int i = 0; i < n; ++i) t[off + i * n + i] = algebra.trace_weights()[k];
  }
  return t;
}

}  // namespace starmod
