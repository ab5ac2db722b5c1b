#include "starmod/bimodule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "starmod/error.hpp"

namespace starmod {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

double rel(double residual, double scale) { return residual / (1.0 + scale); }

// Reassemble the (d*n_k) x (d*n_k) Hermitian block matrix of an A-valued
// sesquilinear form given its flat coordinates.
std::vector<MatrixXcd> assemble_block_grams(const CStarAlgebra& algebra, int dim,
                                            const MatrixXcd& q_flat) {
  std::vector<MatrixXcd> grams;
  grams.reserve(algebra.num_blocks());
  for (int k = 0; k < algebra.num_blocks(); ++k) {
    const int n = algebra.block_dims()[k];
    const int off = algebra.block_offset(k);
    MatrixXcd big = MatrixXcd::Zero(dim * n, dim * n);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s)
            big(i * n + r, j * n + s) = q_flat(i * dim + j, off + r * n + s);
    grams.push_back(std::move(big));
  }
  return grams;
}

struct EigSplit {
  Eigen::VectorXd eigenvalues;
  MatrixXcd vectors;
  int num_null = 0;  // leading (smallest) eigenvalues below threshold
};

EigSplit split_null(const MatrixXcd& gram, double tol) {
  EigSplit out;
  if (gram.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (gram + gram.adjoint()));
  out.eigenvalues = es.eigenvalues();
  out.vectors = es.eigenvectors();
  const double lmax = std::max(0.0, out.eigenvalues.maxCoeff());
  const double thresh = tol * lmax;
  out.num_null = 0;
  while (out.num_null < out.eigenvalues.size() &&
         out.eigenvalues[out.num_null] <= thresh)
    ++out.num_null;
  return out;
}

}  // namespace

ModuleElement ModuleElement::operator+(const ModuleElement& rhs) const {
  if (owner_ != rhs.owner_) fail("OwnerMismatch", "elements of different modules");
  return ModuleElement(owner_, coords_ + rhs.coords_);
}

ModuleElement ModuleElement::operator-(const ModuleElement& rhs) const {
  if (owner_ != rhs.owner_) fail("OwnerMismatch", "elements of different modules");
  return ModuleElement(owner_, coords_ - rhs.coords_);
}

ModuleElement ModuleElement::operator*(std::complex<double> s) const {
  return ModuleElement(owner_, s * coords_);
}

double AxiomReport::max_residual() const {
  double m = 0.0;
  for (const auto& c : checks) m = std::max(m, c.residual);
  return m;
}

const AxiomCheck* AxiomReport::worst() const {
  const AxiomCheck* w = nullptr;
  for (const auto& c : checks)
    if (!w || c.residual > w->residual) w = &c;
  return w;
}

StarBimodule StarBimodule::make(CStarAlgebra algebra,
                                std::vector<MatrixXcd> left_action,
                                std::vector<MatrixXcd> right_action,
                                std::vector<std::vector<AlgElement>> pairing,
                                MatrixXcd involution, double tol) {
  auto data = std::make_shared<BimoduleData>();
  data->algebra = std::move(algebra);
  data->dim = static_cast<int>(involution.rows());
  data->left_action = std::move(left_action);
  data->right_action = std::move(right_action);
  data->pairing = std::move(pairing);
  data->involution = std::move(involution);

  const int d = data->dim;
  const int da = data->algebra.dim();
  if (data->involution.cols() != d) fail("ShapeMismatch", "involution not square");
  if (static_cast<int>(data->left_action.size()) != da ||
      static_cast<int>(data->right_action.size()) != da)
    fail("ShapeMismatch", "one action matrix per algebra basis index required");
  for (const auto& m : data->left_action)
    if (m.rows() != d || m.cols() != d) fail("ShapeMismatch", "left action shape");
  for (const auto& m : data->right_action)
    if (m.rows() != d || m.cols() != d) fail("ShapeMismatch", "right action shape");
  if (static_cast<int>(data->pairing.size()) != d)
    fail("ShapeMismatch", "pairing table must be dim x dim");
  for (const auto& row : data->pairing) {
    if (static_cast<int>(row.size()) != d)
      fail("ShapeMismatch", "pairing table must be dim x dim");
    for (const auto& entry : row)
      if (!entry.shape_matches(data->algebra))
        fail("ShapeMismatch", "pairing value not in the algebra");
  }

  // flat caches
  data->pairing_flat = MatrixXcd::Zero(d * d, da);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      data->pairing_flat.row(i * d + j) =
          data->algebra.coords(data->pairing[i][j]).transpose();

  const MatrixXcd& s = data->involution;
  data->ql_flat = MatrixXcd::Zero(d * d, da);
  data->qr_flat = MatrixXcd::Zero(d * d, da);
  for (int i = 0; i < d; ++i) {
    // <e_i, e_j>_l = sum_p S(p,j) <e_i, e_p>
    data->ql_flat.middleRows(i * d, d) =
        s.transpose() * data->pairing_flat.middleRows(i * d, d);
  }
  for (int p = 0; p < d; ++p)
    for (int i = 0; i < d; ++i) {
      // <e_i, e_j>_r = sum_p S(p,i) <e_p, e_j>
      if (s(p, i) != 0.0)
        data->qr_flat.middleRows(i * d, d) +=
            s(p, i) * data->pairing_flat.middleRows(p * d, d);
    }

  const Eigen::RowVectorXcd t = trace_functional(data->algebra);
  const VectorXcd gl = data->ql_flat * t.transpose();
  const VectorXcd gr = data->qr_flat * t.transpose();
  data->gram_l = MatrixXcd::Zero(d, d);
  data->gram_r = MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      data->gram_l(i, j) = gl[i * d + j];
      data->gram_r(i, j) = gr[i * d + j];
    }

  AxiomReport report = verify_axioms(*data, tol);
  if (!report.pass) {
    const AxiomCheck* worst = nullptr;
    for (const auto& c : report.checks)
      if (!c.pass && (!worst || c.residual > worst->residual)) worst = &c;
    fail("AxiomViolation", worst->axiom + " residual " +
                               std::to_string(worst->residual));
  }
  return StarBimodule(std::move(data));
}

ModuleElement StarBimodule::element(VectorXcd coords) const {
  if (coords.size() != dim()) fail("ShapeMismatch", "coordinate length mismatch");
  return ModuleElement(data_, std::move(coords));
}

ModuleElement StarBimodule::basis_element(int i) const {
  VectorXcd v = VectorXcd::Zero(dim());
  v[i] = 1.0;
  return ModuleElement(data_, std::move(v));
}

ModuleElement StarBimodule::zero() const {
  return ModuleElement(data_, VectorXcd::Zero(dim()));
}

ModuleElement StarBimodule::random_element(RngStream& rng) const {
  VectorXcd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = rng.normal_complex();
  return ModuleElement(data_, std::move(v));
}

void StarBimodule::check_owner(const ModuleElement& x) const {
  if (x.owner() != data_) fail("OwnerMismatch", "element of a different module");
}

ModuleElement StarBimodule::act_left(const AlgElement& a,
                                     const ModuleElement& x) const {
  check_owner(x);
  return ModuleElement(data_, left_matrix(a) * x.coords());
}

ModuleElement StarBimodule::act_right(const ModuleElement& x,
                                      const AlgElement& a) const {
  check_owner(x);
  return ModuleElement(data_, right_matrix(a) * x.coords());
}

ModuleElement StarBimodule::star(const ModuleElement& x) const {
  check_owner(x);
  return ModuleElement(data_, data_->involution * x.coords().conjugate());
}

AlgElement StarBimodule::pair(const ModuleElement& x,
                              const ModuleElement& y) const {
  check_owner(x);
  check_owner(y);
  const int d = dim();
  VectorXcd xy(d * d);
  for (int i = 0; i < d; ++i)
    xy.segment(i * d, d) = x.coords()[i] * y.coords();
  return data_->algebra.from_coords(data_->pairing_flat.transpose() * xy);
}

AlgElement StarBimodule::inner_l(const ModuleElement& x,
                                 const ModuleElement& y) const {
  return pair(x, star(y));
}

AlgElement StarBimodule::inner_r(const ModuleElement& x,
                                 const ModuleElement& y) const {
  return pair(star(x), y);
}

double StarBimodule::seminorm_l(const ModuleElement& x) const {
  return std::sqrt(op_norm(inner_l(x, x)));
}

double StarBimodule::seminorm_r(const ModuleElement& x) const {
  return std::sqrt(op_norm(inner_r(x, x)));
}

double StarBimodule::norm_m(const ModuleElement& x) const {
  return std::max(seminorm_l(x), seminorm_r(x));
}

MatrixXcd StarBimodule::left_matrix(const AlgElement& a) const {
  const VectorXcd c = data_->algebra.coords(a);
  MatrixXcd m = MatrixXcd::Zero(dim(), dim());
  for (int alpha = 0; alpha < c.size(); ++alpha)
    if (c[alpha] != 0.0) m += c[alpha] * data_->left_action[alpha];
  return m;
}

MatrixXcd StarBimodule::right_matrix(const AlgElement& a) const {
  const VectorXcd c = data_->algebra.coords(a);
  MatrixXcd m = MatrixXcd::Zero(dim(), dim());
  for (int alpha = 0; alpha < c.size(); ++alpha)
    if (c[alpha] != 0.0) m += c[alpha] * data_->right_action[alpha];
  return m;
}

std::vector<MatrixXcd> StarBimodule::block_gram_l() const {
  return assemble_block_grams(data_->algebra, dim(), data_->ql_flat);
}

std::vector<MatrixXcd> StarBimodule::block_gram_r() const {
  return assemble_block_grams(data_->algebra, dim(), data_->qr_flat);
}

AxiomReport verify_axioms(const StarBimodule& module, double tol) {
  return verify_axioms(*module.data(), tol);
}

AxiomReport verify_axioms(const BimoduleData& data, double tol) {
  AxiomReport report;
  report.tol = tol;
  const int d = data.dim;
  const int da = data.algebra.dim();
  const CStarAlgebra& A = data.algebra;
  const MatrixXcd& S = data.involution;

  auto add = [&](std::string axiom, double residual) {
    report.checks.push_back({std::move(axiom), residual, residual <= tol});
  };

  const double pscale = data.pairing_flat.size() ? data.pairing_flat.norm() : 0.0;

  // involutive: S conj(S) = I
  add("involution_involutive",
      d ? rel((S * S.conjugate() - MatrixXcd::Identity(d, d)).norm(), S.norm())
        : 0.0);

  // axiom (a): <x,y>* = <y*, x*> on basis pairs
  {
    double resid = 0.0;
    for (int alpha = 0; alpha < da; ++alpha) {
      MatrixXcd p_alpha(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) p_alpha(i, j) = data.pairing_flat(i * d + j, alpha);
      // lhs column sigma(alpha) of coords(<e_i,e_j>*) is conj of column alpha
      MatrixXcd lhs(d, d);
      const int sa = A.basis_adjoint_index(alpha);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          lhs(i, j) = std::conj(data.pairing_flat(i * d + j, sa));
      const MatrixXcd rhs = (S.transpose() * p_alpha * S).transpose();
      resid = std::max(resid, (lhs - rhs).norm());
    }
    add("axiom_a_pairing_adjoint", rel(resid, pscale));
  }

  // axiom (b): (a x)* = x* a* on algebra-basis x module-basis pairs
  {
    double resid = 0.0;
    for (int alpha = 0; alpha < da; ++alpha) {
      const MatrixXcd lhs = S * data.left_action[alpha].conjugate();
      const MatrixXcd rhs = data.right_action[A.basis_adjoint_index(alpha)] * S;
      resid = std::max(resid, rel((lhs - rhs).norm(), lhs.norm() + rhs.norm()));
    }
    add("axiom_b_involution_actions", resid);
  }

  // axiom (c): the block Gram of each sesquilinear product is PSD
  for (const char* which : {"l", "r"}) {
    const auto grams = assemble_block_grams(
        A, d, which[0] == 'l' ? data.ql_flat : data.qr_flat);
    double herm_resid = 0.0;
    double min_eig = 0.0;
    double max_eig = 0.0;
    for (const auto& g : grams) {
      if (g.rows() == 0) continue;
      herm_resid = std::max(herm_resid, rel((g - g.adjoint()).norm(), g.norm()));
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (g + g.adjoint()),
                                                  Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      max_eig = std::max(max_eig, es.eigenvalues().maxCoeff());
    }
    add(std::string("axiom_c_gram_hermitian_") + which, herm_resid);
    add(std::string("axiom_c_positivity_") + which,
        rel(std::max(0.0, -min_eig), max_eig));
  }

  // A-bilinearity on basis triples
  {
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    for (int alpha = 0; alpha < da; ++alpha) {
      const AlgElement b = A.basis_element(alpha);
      const MatrixXcd lmul = left_mult_superop(A, b);
      const MatrixXcd rmul = right_mult_superop(A, b);
      const MatrixXcd& la = data.left_action[alpha];
      const MatrixXcd& ra = data.right_action[alpha];
      for (int i = 0; i < d; ++i) {
        const MatrixXcd pi = data.pairing_flat.middleRows(i * d, d);  // rows j
        // <b e_i, e_j> = b <e_i, e_j>
        MatrixXcd lhs1 = MatrixXcd::Zero(d, da);
        for (int p = 0; p < d; ++p)
          if (la(p, i) != 0.0)
            lhs1 += la(p, i) * data.pairing_flat.middleRows(p * d, d);
        r1 = std::max(r1, (lhs1 - pi * lmul.transpose()).norm());
        // <e_i b, e_j> = <e_i, b e_j>
        MatrixXcd lhs2 = MatrixXcd::Zero(d, da);
        for (int p = 0; p < d; ++p)
          if (ra(p, i) != 0.0)
            lhs2 += ra(p, i) * data.pairing_flat.middleRows(p * d, d);
        r2 = std::max(r2, (lhs2 - la.transpose() * pi).norm());
        // <e_i, e_j b> = <e_i, e_j> b
        r3 = std::max(r3, (ra.transpose() * pi - pi * rmul.transpose()).norm());
      }
    }
    add("bilinear_left", rel(r1, pscale));
    add("bilinear_middle", rel(r2, pscale));
    add("bilinear_right", rel(r3, pscale));
  }

  // actions: unital, multiplicative, commuting
  {
    MatrixXcd l_one = MatrixXcd::Zero(d, d);
    MatrixXcd r_one = MatrixXcd::Zero(d, d);
    const VectorXcd one = A.coords(A.identity());
    for (int alpha = 0; alpha < da; ++alpha) {
      if (one[alpha] != 0.0) {
        l_one += one[alpha] * data.left_action[alpha];
        r_one += one[alpha] * data.right_action[alpha];
      }
    }
    add("action_unital", d ? rel((l_one - MatrixXcd::Identity(d, d)).norm() +
                                     (r_one - MatrixXcd::Identity(d, d)).norm(),
                                 2.0 * std::sqrt(double(d)))
                           : 0.0);

    double rhom = 0.0, rcomm = 0.0;
    for (int alpha = 0; alpha < da; ++alpha) {
      const AlgElement ba = A.basis_element(alpha);
      for (int beta = 0; beta < da; ++beta) {
        const AlgElement prod = ba * A.basis_element(beta);
        const VectorXcd pc = A.coords(prod);
        MatrixXcd l_prod = MatrixXcd::Zero(d, d);
        MatrixXcd r_prod = MatrixXcd::Zero(d, d);
        for (int g = 0; g < da; ++g)
          if (pc[g] != 0.0) {
            l_prod += pc[g] * data.left_action[g];
            r_prod += pc[g] * data.right_action[g];
          }
        const double scale =
            data.left_action[alpha].norm() + data.left_action[beta].norm();
        rhom = std::max(
            rhom, rel((l_prod - data.left_action[alpha] * data.left_action[beta])
                          .norm(),
                      scale));
        rhom = std::max(
            rhom,
            rel((r_prod - data.right_action[beta] * data.right_action[alpha])
                    .norm(),
                scale));
        rcomm = std::max(
            rcomm, rel((data.left_action[alpha] * data.right_action[beta] -
                        data.right_action[beta] * data.left_action[alpha])
                           .norm(),
                       scale));
      }
    }
    add("action_multiplicative", rhom);
    add("action_commute", rcomm);
  }

  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const AxiomCheck& c) { return c.pass; });
  return report;
}

std::vector<VectorXcd> null_space(const StarBimodule& module, double tol) {
  const EigSplit split =
      split_null(module.gram_l() + module.gram_r(), tol);
  std::vector<VectorXcd> basis;
  for (int i = 0; i < split.num_null; ++i) basis.push_back(split.vectors.col(i));
  return basis;
}

QuotientResult quotient_by_null(const StarBimodule& module, double tol) {
  const int d = module.dim();
  const EigSplit split =
      split_null(module.gram_l() + module.gram_r(), tol);
  const int keep = d - split.num_null;
  const MatrixXcd v = split.vectors.rightCols(keep);  // orthonormal complement

  const auto& data = *module.data();
  std::vector<MatrixXcd> left, right;
  left.reserve(data.left_action.size());
  right.reserve(data.right_action.size());
  for (const auto& m : data.left_action) left.push_back(v.adjoint() * m * v);
  for (const auto& m : data.right_action) right.push_back(v.adjoint() * m * v);

  std::vector<std::vector<AlgElement>> pairing(
      keep, std::vector<AlgElement>(keep, module.algebra().zero()));
  for (int i = 0; i < keep; ++i)
    for (int j = 0; j < keep; ++j) {
      VectorXcd xy(d * d);
      for (int p = 0; p < d; ++p) xy.segment(p * d, d) = v(p, i) * v.col(j);
      pairing[i][j] =
          module.algebra().from_coords(data.pairing_flat.transpose() * xy);
    }

  const MatrixXcd s_new = v.adjoint() * data.involution * v.conjugate();

  QuotientResult out;
  out.module = StarBimodule::make(module.algebra(), std::move(left),
                                  std::move(right), std::move(pairing), s_new,
                                  tol);
  out.project = v.adjoint();
  out.section = v;
  return out;
}

std::vector<ModuleElement> selfadjoint_basis(const StarBimodule& module,
                                             double tol) {
  const int d = module.dim();
  if (d == 0) return {};
  const MatrixXcd& s = module.involution_matrix();
  const Eigen::MatrixXd sr = s.real(), si = s.imag();
  Eigen::MatrixXd fix(2 * d, 2 * d);
  fix << sr - Eigen::MatrixXd::Identity(d, d), si, si,
      -sr - Eigen::MatrixXd::Identity(d, d);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(fix, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv[0] : 0.0;
  std::vector<ModuleElement> basis;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] <= tol * std::max(smax, 1.0)) {
      const Eigen::VectorXd w = svd.matrixV().col(i);
      VectorXcd x(d);
      for (int p = 0; p < d; ++p) x[p] = std::complex<double>(w[p], w[d + p]);
      basis.push_back(module.element(std::move(x)));
    }
  }
  return basis;
}

namespace {

// Solve for the adjoint of T with respect to the A-valued l- or r-inner
// product, as a least-squares problem over the flat Gram; rejects when the
// residual shows no adjoint exists.
MatrixXcd solve_adjoint(const StarBimodule& module, const MatrixXcd& t,
                        OperatorSide side, double tol) {
  const int d = module.dim();
  const int da = module.algebra().dim();
  const MatrixXcd& q_flat = (side == OperatorSide::Left)
                                ? module.data()->ql_flat
                                : module.data()->qr_flat;

  // rows indexed by (p, alpha), columns by q
  MatrixXcd lhs(d * da, d);
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      lhs.block(p * da, q, da, 1) = q_flat.row(p * d + q).transpose();

  MatrixXcd rhs = MatrixXcd::Zero(d * da, d);
  for (int j = 0; j < d; ++j)
    for (int p = 0; p < d; ++p)
      for (int i = 0; i < d; ++i) {
        const std::complex<double> c =
            (side == OperatorSide::Left) ? t(i, p) : std::conj(t(i, p));
        if (c != 0.0)
          rhs.block(p * da, j, da, 1) += c * q_flat.row(i * d + j).transpose();
      }

  Eigen::ColPivHouseholderQR<MatrixXcd> qr(lhs);
  const MatrixXcd sol = qr.solve(rhs);
  const double resid = (lhs * sol - rhs).norm();
  const double scale = (1.0 + t.norm()) * (1.0 + q_flat.norm());
  if (resid > tol * scale)
    fail("NotAdjointable",
         "no module adjoint exists (residual " + std::to_string(resid) + ")");
  return (side == OperatorSide::Left) ? sol.conjugate().eval() : sol;
}

void check_module_linear(const StarBimodule& module, const MatrixXcd& t,
                         OperatorSide side, double tol) {
  const auto& actions = (side == OperatorSide::Left)
                            ? module.data()->left_action
                            : module.data()->right_action;
  for (const auto& act : actions) {
    const double resid = (t * act - act * t).norm();
    if (resid > tol * (1.0 + t.norm()) * (1.0 + act.norm()))
      fail("NotAdjointable", side == OperatorSide::Left
                                 ? "matrix is not left A-linear"
                                 : "matrix is not right A-linear");
  }
}

}  // namespace

ModuleOperator make_left_operator(const StarBimodule& module,
                                  const MatrixXcd& matrix, double tol) {
  check_module_linear(module, matrix, OperatorSide::Left, tol);
  ModuleOperator op;
  op.module = module;
  op.side = OperatorSide::Left;
  op.matrix = matrix;
  op.adjoint_matrix = solve_adjoint(module, matrix, OperatorSide::Left, tol);
  return op;
}

ModuleOperator make_right_operator(const StarBimodule& module,
                                   const MatrixXcd& matrix, double tol) {
  check_module_linear(module, matrix, OperatorSide::Right, tol);
  ModuleOperator op;
  op.module = module;
  op.side = OperatorSide::Right;
  op.matrix = matrix;
  op.adjoint_matrix = solve_adjoint(module, matrix, OperatorSide::Right, tol);
  return op;
}

ModuleOperator op_hat(const ModuleOperator& op) {
  const MatrixXcd& s = op.module.involution_matrix();
  ModuleOperator out;
  out.module = op.module;
  out.side =
      (op.side == OperatorSide::Left) ? OperatorSide::Right : OperatorSide::Left;
  out.matrix = s * op.matrix.conjugate() * s.conjugate();
  out.adjoint_matrix = s * op.adjoint_matrix.conjugate() * s.conjugate();
  return out;
}

namespace {

double ratio_supremum(const MatrixXcd& gram, const MatrixXcd& t, double tol) {
  const int d = static_cast<int>(gram.rows());
  if (d == 0) return 0.0;
  const EigSplit split = split_null(gram, tol);
  const int keep = d - split.num_null;
  if (keep == 0) return 0.0;  // seminorm vanishes identically: all ratios 0/0

  Eigen::VectorXd lam = split.eigenvalues.cwiseMax(0.0);
  MatrixXcd ghalf = split.vectors *
                    lam.cwiseSqrt().asDiagonal() * split.vectors.adjoint();

  // A null direction pushed out of the null space makes the ratio unbounded.
  if (split.num_null > 0) {
    const MatrixXcd image = ghalf * t * split.vectors.leftCols(split.num_null);
    const double scale =
        (1.0 + t.norm()) * (1.0 + std::sqrt(std::max(0.0, lam.maxCoeff())));
    if (image.norm() > tol * scale)
      return std::numeric_limits<double>::infinity();
  }

  Eigen::VectorXd lam_pos = lam.tail(keep);
  const MatrixXcd k = ghalf * t * split.vectors.rightCols(keep) *
                      lam_pos.cwiseSqrt().cwiseInverse().asDiagonal();
  if (k.rows() == 1 && k.cols() == 1) return std::abs(k(0, 0));
  Eigen::JacobiSVD<MatrixXcd> svd(k);
  return svd.singularValues()[0];
}

}  // namespace

double op_norm_def4(const StarBimodule& module, const MatrixXcd& matrix,
                    double tol) {
  const double rl = ratio_supremum(module.gram_l(), matrix, tol);
  const double rr = ratio_supremum(module.gram_r(), matrix, tol);
  return std::max(rl, rr);
}

double op_norm_def4(const ModuleOperator& op, double tol) {
  return op_norm_def4(op.module, op.matrix, tol);
}

ModuleOperator left_rep(const StarBimodule& module, const AlgElement& a) {
  ModuleOperator op;
  op.module = module;
  op.side = OperatorSide::Right;  // L_a is right A-linear
  op.matrix = module.left_matrix(a);
  op.adjoint_matrix = module.left_matrix(a.adjoint());
  return op;
}

ModuleOperator right_rep(const StarBimodule& module, const AlgElement& a) {
  ModuleOperator op;
  op.module = module;
  op.side = OperatorSide::Left;  // R_a is left A-linear
  op.matrix = module.right_matrix(a);
  op.adjoint_matrix = module.right_matrix(a.adjoint());
  return op;
}

}  // namespace starmod
