#include "iop/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SparseCore>

#include "iop/errors.hpp"

namespace iop {

namespace {

using Clock = std::chrono::steady_clock;
using SparseMatrix = Eigen::SparseMatrix<double>;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Coefficients below this fraction of the largest one are solver noise and
// are snapped to zero before expansion.
constexpr double kSnapTolerance = 1e-12;
constexpr double kRankThreshold = 1e-10;

// min ||M x - t||  subject to  A x = b, by the nullspace method on a
// column-pivoted QR of A^T.
struct ConstrainedLeastSquares {
  Eigen::VectorXd x;
  Eigen::Index rank = 0;
  double equality_residual = 0.0;
  double kkt_residual = 0.0;
  int refinement_steps = 0;
};

ConstrainedLeastSquares solve_constrained(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const SparseMatrix* M,
                                          const Eigen::VectorXd* t) {
  const Eigen::Index n = A.cols();
  ConstrainedLeastSquares out;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  qr.setThreshold(kRankThreshold);
  qr.compute(A.transpose());
  const Eigen::Index r = qr.rank();
  out.rank = r;
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const auto Q1 = Q.leftCols(r);
  const auto Q2 = Q.rightCols(n - r);
  const auto R11 = qr.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
  const auto& perm = qr.colsPermutation();

  // Minimum-norm particular solution lives in range(A^T) = span(Q1).
  auto range_step = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    const Eigen::VectorXd permuted = perm.transpose() * rhs;
    const Eigen::VectorXd y = R11.transpose().solve(permuted.head(r));
    return Q1 * y;
  };

  Eigen::VectorXd x = range_step(b);
  Eigen::MatrixXd B;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> reduced;
  const bool has_cost = M != nullptr && n - r > 0;
  if (has_cost) {
    B = (*M) * Q2;
    reduced.setThreshold(kRankThreshold);
    reduced.compute(B);
    x += Q2 * reduced.solve(*t - (*M) * x);
  }
  // One step of iterative refinement on both the constraint and the cost.
  const Eigen::VectorXd eq_res = b - A * x;
  x += range_step(eq_res);
  if (has_cost) x += Q2 * reduced.solve(*t - (*M) * x);
  out.refinement_steps = 1;

  out.x = std::move(x);
  out.equality_residual = (A * out.x - b).cwiseAbs().maxCoeff();
  if (M != nullptr) {
    // Stationarity: the cost gradient must lie in range(A^T).
    const Eigen::VectorXd grad = M->transpose() * ((*M) * out.x - *t);
    const double stationarity = n - r > 0 ? (Q2.transpose() * grad).cwiseAbs().maxCoeff() : 0.0;
    const double scale = 1.0 + (M->transpose() * (*t)).cwiseAbs().maxCoeff();
    out.kkt_residual = std::max(stationarity / scale, out.equality_residual);
  }
  return out;
}

TruncatedParam unpack(const Eigen::VectorXd& x, const VariableLayout& layout, Domain domain, double a) {
  TruncatedParam tp = TruncatedParam::zeros(domain, layout.order(), layout.outputs(), layout.inputs(), a);
  const double snap = kSnapTolerance * std::max(1.0, x.cwiseAbs().maxCoeff());
  for (Eigen::Index c = 0; c < layout.size(); ++c) {
    const VariableKey key = layout.key(c);
    const double v = std::abs(x(c)) < snap ? 0.0 : x(c);
    auto& seq = key.block == Block::X ? tp.X : key.block == Block::Y ? tp.Y : key.block == Block::W ? tp.W : tp.Z;
    seq[static_cast<std::size_t>(key.index)](key.row, key.col) = v;
  }
  return tp;
}

// Impulse-response coefficients of a matrix whose poles all sit at the
// origin: entry num/z^d = sum_k num_k z^(k - d).
std::vector<Eigen::MatrixXd> fir_coefficients(const RationalMatrix& P, const char* name) {
  int length = 1;
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      const RationalFunction& f = P(i, j);
      for (const Complex& pole : f.poles())
        if (std::abs(pole) > 1e-12)
          throw std::invalid_argument(std::string("weights: ") + name +
                                      " is not FIR-representable (pole away from the origin)");
      if (f.properness() == Properness::improper) throw std::invalid_argument(std::string("weights: ") + name + " is improper");
      length = std::max(length, f.den().degree() + 1);
    }
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(length), Eigen::MatrixXd::Zero(P.rows(), P.cols()));
  for (Eigen::Index i = 0; i < P.rows(); ++i)
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      const RationalFunction& f = P(i, j);
      const int d = f.den().degree();
      for (int k = 0; k <= f.num().degree(); ++k) out[static_cast<std::size_t>(d - k)](i, j) = f.num().coeff(k);
    }
  return out;
}

struct QuadraticCost {
  SparseMatrix M;
  Eigen::VectorXd t;  // cost = ||M x - t||^2
};

QuadraticCost sensitivity_cost_discrete(const VariableLayout& layout) {
  const Eigen::Index n = layout.size();
  QuadraticCost cost;
  cost.M.resize(n, n);
  cost.M.setIdentity();
  cost.t = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < layout.outputs(); ++i) cost.t(layout.column({Block::X, 0, i, i})) = 1.0;
  for (Eigen::Index i = 0; i < layout.inputs(); ++i) cost.t(layout.column({Block::Z, 0, i, i})) = 1.0;
  return cost;
}

QuadraticCost sensitivity_cost_continuous(const VariableLayout& layout, double a) {
  const int N = layout.order();
  const Eigen::MatrixXd gram = continuous_gram(N, a);
  // cost = sum_e c_e^T Gamma c_e = sum_e ||L^T c_e||^2.
  const Eigen::MatrixXd Lt = gram.llt().matrixL().transpose();
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < layout.size(); ++c) {
    const VariableKey key = layout.key(c);
    if (key.index != 0) continue;
    for (int r = 0; r < N; ++r, ++row)
      for (int i = 1; i <= N; ++i) {
        const double v = Lt(r, i - 1);
        if (v != 0.0) triplets.emplace_back(row, layout.column({key.block, i, key.row, key.col}), v);
      }
  }
  QuadraticCost cost;
  cost.M.resize(row, layout.size());
  cost.M.setFromTriplets(triplets.begin(), triplets.end());
  cost.t = Eigen::VectorXd::Zero(row);
  return cost;
}

QuadraticCost weighted_cost_discrete(const VariableLayout& layout, const Weights& w) {
  const auto Cw = fir_coefficients(w.Pzw, "Pzw");
  const auto U = fir_coefficients(w.Pzu, "Pzu");
  const auto V = fir_coefficients(w.Pyw, "Pyw");
  const Eigen::Index q = w.Pzw.rows();
  const Eigen::Index rdim = w.Pzw.cols();
  const int N = layout.order();
  const int taps = std::max(static_cast<int>(Cw.size()), static_cast<int>(U.size() + V.size()) + N - 1);
  auto row_of = [&](int tap, Eigen::Index i, Eigen::Index l) { return (tap * q + i) * rdim + l; };

  QuadraticCost cost;
  cost.t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(taps) * q * rdim);
  for (std::size_t k = 0; k < Cw.size(); ++k)
    for (Eigen::Index i = 0; i < q; ++i)
      for (Eigen::Index l = 0; l < rdim; ++l) cost.t(row_of(static_cast<int>(k), i, l)) = -Cw[k](i, l);

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t ia = 0; ia < U.size(); ++ia)
    for (int ib = 0; ib <= N; ++ib)
      for (std::size_t ic = 0; ic < V.size(); ++ic) {
        const int tap = static_cast<int>(ia + ic) + ib;
        for (Eigen::Index j = 0; j < layout.inputs(); ++j)
          for (Eigen::Index k = 0; k < layout.outputs(); ++k) {
            const Eigen::Index col = layout.column({Block::Y, ib, j, k});
            for (Eigen::Index i = 0; i < q; ++i) {
              const double u = U[ia](i, j);
              if (u == 0.0) continue;
              for (Eigen::Index l = 0; l < rdim; ++l) {
                const double v = V[ic](k, l);
                if (v != 0.0) triplets.emplace_back(row_of(tap, i, l), col, u * v);
              }
            }
          }
      }
  cost.M.resize(cost.t.size(), layout.size());
  cost.M.setFromTriplets(triplets.begin(), triplets.end());
  return cost;
}

// Rows pinning the constant blocks so the continuous H2 norm is finite.
void append_finite_norm_rows(Eigen::MatrixXd& A, Eigen::VectorXd& b, const VariableLayout& layout) {
  std::vector<std::pair<Eigen::Index, double>> pins;
  const Eigen::Index p = layout.outputs();
  const Eigen::Index m = layout.inputs();
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) pins.emplace_back(layout.column({Block::X, 0, i, j}), i == j ? 1.0 : 0.0);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) pins.emplace_back(layout.column({Block::Z, 0, i, j}), i == j ? 1.0 : 0.0);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < p; ++j) pins.emplace_back(layout.column({Block::Y, 0, i, j}), 0.0);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < m; ++j) pins.emplace_back(layout.column({Block::W, 0, i, j}), 0.0);
  const Eigen::Index base = A.rows();
  A.conservativeResize(base + static_cast<Eigen::Index>(pins.size()), Eigen::NoChange);
  b.conservativeResize(base + static_cast<Eigen::Index>(pins.size()));
  A.bottomRows(static_cast<Eigen::Index>(pins.size())).setZero();
  for (std::size_t k = 0; k < pins.size(); ++k) {
    A(base + static_cast<Eigen::Index>(k), pins[k].first) = 1.0;
    b(base + static_cast<Eigen::Index>(k)) = pins[k].second;
  }
}

void verify_into(const SynthesisProblem& problem, SynthesisResult& result) {
  const auto start = Clock::now();
  SynthesisDiagnostics& diag = result.diagnostics;
  const ClosedLoopQuad quad = expand(result.tp);
  diag.membership = check_iop_membership(problem.G, quad);
  result.K = recover_controller(quad);
  diag.stability = check_internal_stability(realize(problem.G), realize_controller(result.tp));
  if (problem.sparsity) {
    diag.off_pattern_Y = off_pattern_magnitude(quad.Y, *problem.sparsity);
    diag.off_pattern_K = off_pattern_magnitude(result.K, *problem.sparsity);
    diag.sparsity_ok = diag.off_pattern_Y < 1e-7 && diag.off_pattern_K < 1e-7;
  }
  diag.verify_seconds = seconds_since(start);
}

SynthesisResult run(const SynthesisProblem& problem, bool optimize) {
  problem.validate();
  SynthesisResult result;
  SynthesisDiagnostics& diag = result.diagnostics;
  const Domain domain = problem.G.domain();

  auto start = Clock::now();
  const EqualitySystem sys = assemble(problem.G, problem.N, problem.a, problem.sparsity);
  diag.assemble_seconds = seconds_since(start);

  start = Clock::now();
  Eigen::MatrixXd A(sys.A);
  Eigen::VectorXd b = sys.b;
  std::optional<QuadraticCost> cost;
  if (optimize) {
    if (problem.weights) {
      cost = weighted_cost_discrete(sys.layout, *problem.weights);
    } else if (domain == Domain::discrete) {
      cost = sensitivity_cost_discrete(sys.layout);
    } else {
      append_finite_norm_rows(A, b, sys.layout);
      cost = sensitivity_cost_continuous(sys.layout, sys.a);
    }
  }
  diag.variables = A.cols();
  diag.constraints = A.rows();
  const ConstrainedLeastSquares sol =
      cost ? solve_constrained(A, b, &cost->M, &cost->t) : solve_constrained(A, b, nullptr, nullptr);
  diag.rank = sol.rank;
  diag.equality_residual = sol.equality_residual;
  diag.kkt_residual = sol.kkt_residual;
  diag.refinement_steps = sol.refinement_steps;
  diag.solve_seconds = seconds_since(start);
  if (sol.equality_residual > kInfeasibilityThreshold)
    throw InfeasibleError("no exact solution at order N = " + std::to_string(problem.N) +
                              " (equality residual " + std::to_string(sol.equality_residual) +
                              "); increase the truncation order",
                          sol.equality_residual);

  result.tp = unpack(sol.x, sys.layout, domain, sys.a);
  if (optimize) {
    if (problem.weights) {
      Eigen::VectorXd x(sys.layout.size());
      for (Eigen::Index c = 0; c < x.size(); ++c) {
        const VariableKey k = sys.layout.key(c);
        const auto& seq = k.block == Block::X ? result.tp.X : k.block == Block::Y ? result.tp.Y
                                                            : k.block == Block::W ? result.tp.W : result.tp.Z;
        x(c) = seq[static_cast<std::size_t>(k.index)](k.row, k.col);
      }
      result.h2_norm = (cost->M * x - cost->t).norm();
    } else if (domain == Domain::discrete) {
      result.h2_norm = std::sqrt(h2_sq_discrete(result.tp));
    } else {
      result.h2_norm = std::sqrt(h2_sq_continuous(result.tp, 1e-8));
    }
  }
  verify_into(problem, result);
  return result;
}

}  // namespace

std::string_view to_string(Objective o) { return o == Objective::h2 ? "h2" : "none"; }

void SynthesisProblem::validate() const {
  if (N < 1) throw std::invalid_argument("synthesis: truncation order N must be at least 1");
  if (G.domain() == Domain::continuous && (!a || !(*a > 0.0)))
    throw std::invalid_argument("synthesis: continuous-time plants need a > 0");
  if (G.domain() == Domain::discrete && a)
    throw std::invalid_argument("synthesis: the pole shift a only applies to continuous-time plants");
  if (properness_class(G) != Properness::strictly_proper)
    throw ImproperPlantError("synthesis: plant must be strictly proper");
  if (sparsity && (sparsity->rows() != G.cols() || sparsity->cols() != G.rows()))
    throw DimensionError("synthesis: sparsity pattern must be m x p");
  if (weights) {
    if (objective != Objective::h2) throw std::invalid_argument("synthesis: weights require the h2 objective");
    if (G.domain() != Domain::discrete)
      throw std::invalid_argument("synthesis: weighted objectives are only supported in discrete time");
    const Weights& w = *weights;
    for (const RationalMatrix* m : {&w.Pzw, &w.Pzu, &w.Pyw})
      if (m->domain() != G.domain()) throw DomainMismatchError("synthesis: weight domain differs from the plant");
    if (w.Pzu.rows() != w.Pzw.rows() || w.Pyw.cols() != w.Pzw.cols() || w.Pzu.cols() != G.cols() ||
        w.Pyw.rows() != G.rows())
      throw DimensionError("synthesis: weights must be Pzw q x r, Pzu q x m, Pyw p x r");
  }
}

bool SynthesisResult::verified() const {
  return diagnostics.membership.member && diagnostics.stability.stabilizing && diagnostics.sparsity_ok;
}

SynthesisResult solve_feasibility(const SynthesisProblem& problem) {
  if (problem.objective != Objective::none) throw std::invalid_argument("solve_feasibility: objective must be none");
  return run(problem, false);
}

SynthesisResult solve_h2(const SynthesisProblem& problem) {
  if (problem.objective != Objective::h2) throw std::invalid_argument("solve_h2: objective must be h2");
  return run(problem, true);
}

SynthesisResult synthesize(const SynthesisProblem& problem) {
  return problem.objective == Objective::h2 ? solve_h2(problem) : solve_feasibility(problem);
}

}  // namespace iop
