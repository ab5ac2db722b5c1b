#include "starmod/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "starmod/error.hpp"

namespace starmod {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

CStarAlgebra scalars() { return make_algebra({1}, {1.0}); }

AlgElement scalar_element(std::complex<double> z) {
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = z;
  return AlgElement({m});
}

std::vector<MatrixXcd> scalar_actions(int dim) {
  return {MatrixXcd::Identity(dim, dim)};
}

void require_spd(const MatrixXd& g, const char* what) {
  if (g.rows() != g.cols()) fail("ShapeMismatch", "Gram matrix must be square");
  if ((g - g.transpose()).norm() > 1e-12 * (1.0 + g.norm()))
    fail("NotPositiveDefinite", std::string(what) + ": Gram not symmetric");
  if (g.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    fail("NotPositiveDefinite", std::string(what) + ": Gram not positive definite");
}

// Permutation-with-conjugation matrix of the algebra adjoint in the element
// basis; star(x) = star_mat * conj(coords(x)).
MatrixXcd algebra_star_matrix(const CStarAlgebra& algebra) {
  MatrixXcd s = MatrixXcd::Zero(algebra.dim(), algebra.dim());
  for (int alpha = 0; alpha < algebra.dim(); ++alpha)
    s(algebra.basis_adjoint_index(alpha), alpha) = 1.0;
  return s;
}

}  // namespace

StarBimodule gns_bimodule(const CStarAlgebra& algebra, const StateFunctional& phi,
                          double tol) {
  if (!phi.algebra().same_as(algebra))
    fail("NotAState", "state does not belong to the given algebra");
  const int d = algebra.dim();
  std::vector<std::vector<AlgElement>> pairing(
      d, std::vector<AlgElement>(d, scalar_element(0.0)));
  for (int i = 0; i < d; ++i) {
    const AlgElement bi = algebra.basis_element(i);
    for (int j = 0; j < d; ++j)
      pairing[i][j] = scalar_element(phi(bi * algebra.basis_element(j)));
  }
  return StarBimodule::make(scalars(), scalar_actions(d), scalar_actions(d),
                            std::move(pairing), algebra_star_matrix(algebra),
                            tol);
}

StarBimodule complexified_real_hilbert(const MatrixXd& gram, double tol) {
  require_spd(gram, "complexified_real_hilbert");
  const int n = static_cast<int>(gram.rows());
  std::vector<std::vector<AlgElement>> pairing(
      n, std::vector<AlgElement>(n, scalar_element(0.0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pairing[i][j] = scalar_element(gram(i, j));
  return StarBimodule::make(scalars(), scalar_actions(n), scalar_actions(n),
                            std::move(pairing), MatrixXcd::Identity(n, n), tol);
}

StarBimodule hyperbolic_pair(int n, double tol) {
  if (n < 1) fail("NonPositiveDimension", "hyperbolic_pair needs n >= 1");
  const int d = 2 * n;  // v-part then functional part
  std::vector<std::vector<AlgElement>> pairing(
      d, std::vector<AlgElement>(d, scalar_element(0.0)));
  // (v1 + d1, v2 + d2) = d2(v1) = sum_i d2_i v1_i
  for (int i = 0; i < n; ++i) pairing[i][n + i] = scalar_element(1.0);
  MatrixXcd s = MatrixXcd::Zero(d, d);
  s.block(0, n, n, n) = MatrixXcd::Identity(n, n);
  s.block(n, 0, n, n) = MatrixXcd::Identity(n, n);
  return StarBimodule::make(scalars(), scalar_actions(d), scalar_actions(d),
                            std::move(pairing), s, tol);
}

StarBimodule tensor_bimodule(const CStarAlgebra& algebra,
                             const std::vector<int>& ideal_blocks,
                             const MatrixXd& h_gram, double tol) {
  if (ideal_blocks.empty()) fail("EmptyIdeal", "no blocks selected");
  for (int k : ideal_blocks)
    if (k < 0 || k >= algebra.num_blocks())
      fail("ShapeMismatch", "ideal block index out of range");
  require_spd(h_gram, "tensor_bimodule");
  const int kdim = static_cast<int>(h_gram.rows());
  if (kdim == 0) fail("NonPositiveDimension", "H must have dimension >= 1");

  // module basis: (algebra basis element of a selected block) x (H basis)
  std::vector<int> alg_idx;  // algebra basis indices spanning the ideal
  for (int k : ideal_blocks) {
    const int n = algebra.block_dims()[k];
    for (int t = 0; t < n * n; ++t)
      alg_idx.push_back(algebra.block_offset(k) + t);
  }
  const int di = static_cast<int>(alg_idx.size());
  const int d = di * kdim;
  auto flat = [&](int a, int h) { return a * kdim + h; };

  // actions: multiply the ideal coordinate, fix the H coordinate
  std::vector<MatrixXcd> left(algebra.dim(), MatrixXcd::Zero(d, d));
  std::vector<MatrixXcd> right(algebra.dim(), MatrixXcd::Zero(d, d));
  for (int alpha = 0; alpha < algebra.dim(); ++alpha) {
    const MatrixXcd lmul = left_mult_superop(algebra, algebra.basis_element(alpha));
    const MatrixXcd rmul = right_mult_superop(algebra, algebra.basis_element(alpha));
    for (int a = 0; a < di; ++a)
      for (int b = 0; b < di; ++b) {
        const std::complex<double> lc = lmul(alg_idx[a], alg_idx[b]);
        const std::complex<double> rc = rmul(alg_idx[a], alg_idx[b]);
        for (int h = 0; h < kdim; ++h) {
          if (lc != 0.0) left[alpha](flat(a, h), flat(b, h)) = lc;
          if (rc != 0.0) right[alpha](flat(a, h), flat(b, h)) = rc;
        }
      }
  }

  std::vector<std::vector<AlgElement>> pairing(
      d, std::vector<AlgElement>(d, algebra.zero()));
  for (int a = 0; a < di; ++a) {
    const AlgElement ba = algebra.basis_element(alg_idx[a]);
    for (int b = 0; b < di; ++b) {
      const AlgElement prod = ba * algebra.basis_element(alg_idx[b]);
      for (int h1 = 0; h1 < kdim; ++h1)
        for (int h2 = 0; h2 < kdim; ++h2)
          pairing[flat(a, h1)][flat(b, h2)] = prod * h_gram(h1, h2);
    }
  }

  // (a tensor v)* = a* tensor v
  MatrixXcd s = MatrixXcd::Zero(d, d);
  for (int a = 0; a < di; ++a) {
    int astar_local = -1;
    const int target = algebra.basis_adjoint_index(alg_idx[a]);
    for (int b = 0; b < di; ++b)
      if (alg_idx[b] == target) astar_local = b;
    for (int h = 0; h < kdim; ++h) s(flat(astar_local, h), flat(a, h)) = 1.0;
  }
  return StarBimodule::make(algebra, std::move(left), std::move(right),
                            std::move(pairing), s, tol);
}

StarBimodule expectation_bimodule(const ConditionalExpectation& phi,
                                  double tol) {
  const CStarAlgebra& a = phi.source();
  const CStarAlgebra& b = phi.target();
  const int d = a.dim();

  std::vector<MatrixXcd> left(b.dim()), right(b.dim());
  for (int beta = 0; beta < b.dim(); ++beta) {
    const AlgElement emb = phi.embed(b.basis_element(beta));
    left[beta] = left_mult_superop(a, emb);
    right[beta] = right_mult_superop(a, emb);
  }

  std::vector<std::vector<AlgElement>> pairing(
      d, std::vector<AlgElement>(d, b.zero()));
  for (int i = 0; i < d; ++i) {
    const AlgElement bi = a.basis_element(i);
    for (int j = 0; j < d; ++j)
      pairing[i][j] = phi.apply(bi * a.basis_element(j));
  }
  return StarBimodule::make(b, std::move(left), std::move(right),
                            std::move(pairing), algebra_star_matrix(a), tol);
}

StarBimodule fell_bundle_module(const FellBundleFinite& bundle, double tol) {
  const int n = bundle.base_points;
  if (n < 1) fail("NonPositiveDimension", "bundle needs at least one point");
  if (static_cast<int>(bundle.fiber_dims.size()) != n ||
      static_cast<int>(bundle.fiber_grams.size()) != n)
    fail("ShapeMismatch", "one fiber dim and Gram per point required");
  std::vector<double> weights(n, 1.0);
  std::vector<int> dims(n, 1);
  CStarAlgebra base = make_algebra(dims, weights);

  int d = 0;
  std::vector<int> offsets(n, 0);
  for (int p = 0; p < n; ++p) {
    offsets[p] = d;
    if (bundle.fiber_dims[p] < 0) fail("ShapeMismatch", "negative fiber dim");
    if (bundle.fiber_dims[p] > 0) {
      if (bundle.fiber_grams[p].rows() != bundle.fiber_dims[p])
        fail("ShapeMismatch", "fiber Gram size mismatch");
      require_spd(bundle.fiber_grams[p], "fell_bundle_module");
    }
    d += bundle.fiber_dims[p];
  }

  // one action matrix per point indicator: identity on that point's fiber
  std::vector<MatrixXcd> left(n, MatrixXcd::Zero(d, d));
  for (int p = 0; p < n; ++p)
    for (int t = 0; t < bundle.fiber_dims[p]; ++t)
      left[p](offsets[p] + t, offsets[p] + t) = 1.0;
  std::vector<MatrixXcd> right = left;

  std::vector<std::vector<AlgElement>> pairing(
      d, std::vector<AlgElement>(d, base.zero()));
  for (int p = 0; p < n; ++p)
    for (int t1 = 0; t1 < bundle.fiber_dims[p]; ++t1)
      for (int t2 = 0; t2 < bundle.fiber_dims[p]; ++t2) {
        AlgElement v = base.zero();
        v.block(p)(0, 0) = bundle.fiber_grams[p](t1, t2);
        pairing[offsets[p] + t1][offsets[p] + t2] = v;
      }

  return StarBimodule::make(base, std::move(left), std::move(right),
                            std::move(pairing), MatrixXcd::Identity(d, d), tol);
}

FellDecomposition fell_decompose(const StarBimodule& module, double tol) {
  const CStarAlgebra& base = module.algebra();
  if (!base.commutative())
    fail("NotCommutativeBase", "base algebra has a block of size >= 2");
  const int n = base.num_blocks();
  const int d = module.dim();

  const std::vector<ModuleElement> sa = selfadjoint_basis(module, tol);
  const int m = static_cast<int>(sa.size());

  // reality condition: <x, y> self-adjoint (real at each point) for
  // self-adjoint x, y
  double pairing_scale = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      pairing_scale =
          std::max(pairing_scale, op_norm(module.pair(sa[i], sa[j])));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const AlgElement v = module.pair(sa[i], sa[j]);
      if (op_norm(v - v.adjoint()) > tol * (1.0 + pairing_scale))
        fail("RealityConditionFails",
             "inner product of self-adjoint elements is not self-adjoint");
    }

  // the two actions coincide (a consequence of reality over a commutative
  // base; violation signals an inconsistent module)
  for (int p = 0; p < n; ++p) {
    const AlgElement q = base.basis_element(base.block_offset(p));
    const MatrixXcd diff = module.left_matrix(q) - module.right_matrix(q);
    if (diff.norm() > tol * (1.0 + std::sqrt(double(d))))
      fail("ActionsDiffer", "left and right actions disagree");
  }

  // fibers: image of E_sa under each point's indicator, Gram read from the
  // pairing at the point; rank decided at tol * (largest eigenvalue)
  FellBundleFinite bundle;
  bundle.base_points = n;
  bundle.fiber_dims.assign(n, 0);
  bundle.fiber_grams.assign(n, MatrixXd());
  std::vector<std::vector<VectorXcd>> fiber_vectors(n);

  for (int p = 0; p < n; ++p) {
    if (d == 0 || m == 0) break;  // zero module: every fiber is empty
    const AlgElement q = base.basis_element(base.block_offset(p));
    const MatrixXcd qmat = module.left_matrix(q);
    // real span of {q . s_j} in the (orthonormal) sa-coordinates
    Eigen::MatrixXd span(2 * d, m);
    std::vector<VectorXcd> images(m);
    for (int j = 0; j < m; ++j) {
      const VectorXcd img = qmat * sa[j].coords();
      images[j] = img;
      span.col(j) << img.real(), img.imag();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(span,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    int rank = 0;
    while (rank < sv.size() && sv[rank] > tol * smax && smax > 0.0) ++rank;
    bundle.fiber_dims[p] = rank;
    if (rank == 0) {
      bundle.fiber_grams[p] = MatrixXd();
      continue;
    }
    // orthonormal basis of the image subspace (real combinations of images)
    std::vector<VectorXcd> basis(rank);
    for (int r = 0; r < rank; ++r) {
      const Eigen::VectorXd u = svd.matrixU().col(r);
      VectorXcd v(d);
      for (int t = 0; t < d; ++t) v[t] = std::complex<double>(u[t], u[d + t]);
      basis[r] = v;
    }
    MatrixXd gram(rank, rank);
    for (int r1 = 0; r1 < rank; ++r1)
      for (int r2 = 0; r2 < rank; ++r2) {
        const AlgElement val =
            module.pair(module.element(basis[r1]), module.element(basis[r2]));
        gram(r1, r2) = val.block(p)(0, 0).real();
      }
    bundle.fiber_grams[p] = 0.5 * (gram + gram.transpose());
    fiber_vectors[p] = std::move(basis);
  }

  FellDecomposition out;
  out.bundle = bundle;
  out.model = fell_bundle_module(bundle, std::max(tol, 1e-8));

  // isomorphism: x -> fiber coordinates of q_p x in the extracted basis
  out.iso = MatrixXcd::Zero(out.model.dim(), d);
  int row = 0;
  for (int p = 0; p < n; ++p) {
    const int r = bundle.fiber_dims[p];
    if (r == 0) continue;
    const AlgElement q = base.basis_element(base.block_offset(p));
    const MatrixXcd qmat = module.left_matrix(q);
    MatrixXcd functionals(r, d);  // row i: x -> <u_i, q_p x>(p)
    for (int i = 0; i < r; ++i) {
      const ModuleElement ui = module.element(fiber_vectors[p][i]);
      for (int j = 0; j < d; ++j) {
        const ModuleElement qej = module.element(qmat.col(j));
        functionals(i, j) = module.pair(ui, qej).block(p)(0, 0);
      }
    }
    out.iso.middleRows(row, r) =
        bundle.fiber_grams[p].cast<std::complex<double>>().lu().solve(functionals);
    row += r;
  }

  // intertwining residuals
  double resid = 0.0;
  for (int p = 0; p < n; ++p) {
    const AlgElement q = base.basis_element(base.block_offset(p));
    resid = std::max(resid, (out.iso * module.left_matrix(q) -
                             out.model.left_matrix(q) * out.iso)
                                .norm());
  }
  resid = std::max(resid, (out.iso * module.involution_matrix() -
                           out.model.involution_matrix() * out.iso.conjugate())
                              .norm());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const AlgElement lhs = module.pair(module.basis_element(i),
                                         module.basis_element(j));
      const AlgElement rhs =
          out.model.pair(out.model.element(out.iso.col(i)),
                         out.model.element(out.iso.col(j)));
      resid = std::max(resid, op_norm(lhs - rhs));
    }
  out.residual = resid;
  return out;
}

DirectSumModule direct_sum_module(const CStarAlgebra& algebra,
                                  const std::vector<AlgElement>& projections,
                                  double tol) {
  // validate: central projections are 0/1 combinations of block indicators
  std::vector<std::vector<int>> summand_blocks;
  for (const auto& p : projections) {
    if (!p.shape_matches(algebra))
      fail("ShapeMismatch", "projection not in the algebra");
    if (op_norm(p * p - p) > tol * (1.0 + op_norm(p)) ||
        op_norm(p - p.adjoint()) > tol * (1.0 + op_norm(p)))
      fail("NotCentralProjection", "not a projection");
    std::vector<int> blocks;
    for (int k = 0; k < algebra.num_blocks(); ++k) {
      const int nk = algebra.block_dims()[k];
      const MatrixXcd& bk = p.block(k);
      const double dist0 = bk.norm();
      const double dist1 = (bk - MatrixXcd::Identity(nk, nk)).norm();
      if (dist0 <= tol * (1.0 + std::sqrt(double(nk)))) continue;
      if (dist1 <= tol * (1.0 + std::sqrt(double(nk)))) {
        blocks.push_back(k);
        continue;
      }
      fail("NotCentralProjection", "projection is not central");
    }
    summand_blocks.push_back(std::move(blocks));
  }

  // module basis: per summand, the matrix-unit basis of its blocks
  std::vector<std::vector<int>> summand_basis(projections.size());
  std::vector<std::vector<int>> summand_alg(projections.size());
  int d = 0;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    for (int k : summand_blocks[i]) {
      const int nk = algebra.block_dims()[k];
      for (int t = 0; t < nk * nk; ++t) {
        summand_basis[i].push_back(d++);
        summand_alg[i].push_back(algebra.block_offset(k) + t);
      }
    }
  }

  std::vector<MatrixXcd> left(algebra.dim(), MatrixXcd::Zero(d, d));
  std::vector<MatrixXcd> right(algebra.dim(), MatrixXcd::Zero(d, d));
  for (int alpha = 0; alpha < algebra.dim(); ++alpha) {
    const MatrixXcd lmul = left_mult_superop(algebra, algebra.basis_element(alpha));
    const MatrixXcd rmul = right_mult_superop(algebra, algebra.basis_element(alpha));
    for (std::size_t i = 0; i < projections.size(); ++i) {
      const auto& loc = summand_basis[i];
      const auto& glo = summand_alg[i];
      for (std::size_t a = 0; a < loc.size(); ++a)
        for (std::size_t b = 0; b < loc.size(); ++b) {
          if (lmul(glo[a], glo[b]) != 0.0)
            left[alpha](loc[a], loc[b]) = lmul(glo[a], glo[b]);
          if (rmul(glo[a], glo[b]) != 0.0)
            right[alpha](loc[a], loc[b]) = rmul(glo[a], glo[b]);
        }
    }
  }

  std::vector<std::vector<AlgElement>> pairing(
      d, std::vector<AlgElement>(d, algebra.zero()));
  MatrixXcd s = MatrixXcd::Zero(d, d);
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const auto& loc = summand_basis[i];
    const auto& glo = summand_alg[i];
    for (std::size_t a = 0; a < loc.size(); ++a) {
      const AlgElement ba = algebra.basis_element(glo[a]);
      for (std::size_t b = 0; b < loc.size(); ++b)
        pairing[loc[a]][loc[b]] = ba * algebra.basis_element(glo[b]);
      // (+ a_i)* = + a_i*, summand-wise algebra adjoint
      const int target = algebra.basis_adjoint_index(glo[a]);
      for (std::size_t b = 0; b < loc.size(); ++b)
        if (glo[b] == target) s(loc[b], loc[a]) = 1.0;
    }
  }

  DirectSumModule out;
  out.module = StarBimodule::make(algebra, std::move(left), std::move(right),
                                  std::move(pairing), s, tol);
  out.projections = projections;
  out.summand_basis = std::move(summand_basis);
  out.summand_algebra_indices = std::move(summand_alg);
  return out;
}

}  // namespace starmod
