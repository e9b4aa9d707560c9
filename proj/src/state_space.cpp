#include "iop/state_space.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "iop/errors.hpp"

namespace iop {

namespace {

// Orthonormal basis of the smallest A-invariant subspace containing range(B).
template <typename Matrix>
Matrix reachable_basis(const Matrix& A, const Matrix& B, double tol) {
  const Eigen::Index n = A.rows();
  Matrix Q(n, 0);
  const double scale = std::max({1.0, A.norm(), B.norm()});
  Matrix V = B;
  while (Q.cols() < n && V.cols() > 0) {
    for (int pass = 0; pass < 2; ++pass) V -= Q * (Q.adjoint() * V);
    Eigen::JacobiSVD<Matrix> svd(V, Eigen::ComputeThinU);
    Eigen::Index k = 0;
    while (k < svd.singularValues().size() && svd.singularValues()(k) > tol * scale) ++k;
    k = std::min(k, n - Q.cols());
    if (k == 0) break;
    const Matrix fresh = svd.matrixU().leftCols(k);
    Q.conservativeResize(Eigen::NoChange, Q.cols() + k);
    Q.rightCols(k) = fresh;
    V = A * fresh;
  }
  return Q;
}

// Eigenvalues of the controllable and observable part of (A, B, C).
std::vector<Complex> minimal_eigenvalues(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                         const Eigen::MatrixXcd& C, double tol) {
  if (A.rows() == 0) return {};
  const Eigen::MatrixXcd R = reachable_basis<Eigen::MatrixXcd>(A, B, tol);
  const Eigen::MatrixXcd Ar = R.adjoint() * A * R;
  const Eigen::MatrixXcd Cr = C * R;
  const Eigen::MatrixXcd O = reachable_basis<Eigen::MatrixXcd>(Ar.adjoint(), Cr.adjoint(), tol);
  if (O.cols() == 0) return {};
  const Eigen::VectorXcd eig = (O.adjoint() * Ar * O).eigenvalues();
  return {eig.data(), eig.data() + eig.size()};
}

// Moves the eigenvalue at T(k + 1, k + 1) above T(k, k) in a complex Schur
// form A = U T U^H.
void swap_adjacent(Eigen::MatrixXcd& T, Eigen::MatrixXcd& U, Eigen::Index k) {
  const Complex a = T(k, k);
  const Complex c = T(k + 1, k + 1);
  Eigen::Vector2cd v(T(k, k + 1), c - a);
  v.normalize();
  Eigen::Matrix2cd Q;
  Q << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
  T.middleRows(k, 2) = Q.adjoint() * T.middleRows(k, 2);
  T.middleCols(k, 2) = T.middleCols(k, 2) * Q;
  U.middleCols(k, 2) = U.middleCols(k, 2) * Q;
  T(k + 1, k) = 0.0;
}

StateSpace project(const StateSpace& sys, const Eigen::MatrixXd& Q) {
  StateSpace out;
  out.domain = sys.domain;
  out.A = Q.transpose() * sys.A * Q;
  out.B = Q.transpose() * sys.B;
  out.C = sys.C * Q;
  out.D = sys.D;
  return out;
}

// Eigenvalues of a repeated root come back spread by roughly
// eps^(1 / multiplicity). Candidate merge radii for such clusters, relative
// to max(1, |root|).
constexpr std::array<double, 7> kClusterRadii = {0.0, 1e-8, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};

// Replaces each cluster of roots within tol of one another by its mean.
std::vector<Complex> merge_clusters(std::vector<Complex> roots, double tol) {
  const std::size_t n = roots.size();
  std::vector<std::size_t> label(n);
  for (std::size_t i = 0; i < n; ++i) label[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return label[i] == i ? i : label[i] = find(label[i]);
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(roots[i] - roots[j]) <= tol * std::max(1.0, std::abs(roots[i])))
        label[find(i)] = find(j);
  std::map<std::size_t, std::pair<Complex, int>> sums;
  for (std::size_t i = 0; i < n; ++i) {
    auto& [sum, count] = sums[find(i)];
    sum += roots[i];
    ++count;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [sum, count] = sums[find(i)];
    Complex mean = sum / static_cast<double>(count);
    if (count > 1 && std::abs(mean.imag()) <= tol * std::max(1.0, std::abs(mean))) mean.imag(0.0);
    roots[i] = mean;
  }
  return roots;
}

// d + r / den for a SISO realization, with the remainder r of degree below
// that of den fitted to samples of (H - d) den on a circle of the given radius.
RationalFunction interpolate(const StateSpace& entry, const std::vector<Complex>& poles, double radius) {
  const double d = entry.D(0, 0);
  const Polynomial den = Polynomial::from_roots(poles);
  const auto n = static_cast<Eigen::Index>(poles.size());
  Eigen::VectorXcd samples(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const Complex x = std::polar(radius, 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(n));
    samples(s) = (entry.evaluate(x)(0, 0) - d) * den(x);
  }
  std::vector<double> num(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) {
    Complex acc = 0.0;
    for (Eigen::Index s = 0; s < n; ++s)
      acc += samples(s) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(l * s) / static_cast<double>(n));
    num[static_cast<std::size_t>(l)] = acc.real() / (static_cast<double>(n) * std::pow(radius, static_cast<double>(l)));
  }
  return RationalFunction::from_poles(Polynomial(std::move(num)) + d * den, poles);
}

constexpr double kSharedPoleTolerance = 1e-6;

// Appends one column realized in controllable form over the least common
// multiple of its entry denominators, matching poles that agree to within
// kSharedPoleTolerance.
void append_column(const RationalMatrix& m, Eigen::Index col, StateSpace& sys) {
  std::vector<Complex> shared;
  std::vector<std::vector<Complex>> missing(static_cast<std::size_t>(m.rows()));
  std::vector<std::vector<bool>> used(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index row = 0; row < m.rows(); ++row) {
    const RationalFunction& f = m(row, col);
    if (f.is_zero()) continue;
    if (f.properness() == Properness::improper) throw ImproperPlantError("realize: entry is improper");
    std::vector<bool> taken(shared.size(), false);
    for (const Complex p : f.poles()) {
      std::size_t k = 0;
      while (k < shared.size() && (taken[k] || std::abs(shared[k] - p) > kSharedPoleTolerance * std::max(1.0, std::abs(p))))
        ++k;
      if (k == shared.size()) {
        shared.push_back(p);
        taken.push_back(true);
        for (auto& u : used) u.push_back(false);
      } else {
        taken[k] = true;
      }
    }
    used[static_cast<std::size_t>(row)] = std::move(taken);
  }
  for (auto& u : used) u.resize(shared.size(), false);
  const Polynomial den = Polynomial::from_roots(shared);
  const int n = den.degree();
  const Eigen::Index base = sys.A.rows();
  if (n > 0) {
    sys.A.conservativeResize(base + n, base + n);
    sys.A.rightCols(n).setZero();
    sys.A.bottomRows(n).setZero();
    sys.B.conservativeResize(base + n, Eigen::NoChange);
    sys.B.bottomRows(n).setZero();
    sys.C.conservativeResize(Eigen::NoChange, base + n);
    sys.C.rightCols(n).setZero();
    for (int i = 0; i + 1 < n; ++i) sys.A(base + i, base + i + 1) = 1.0;
    for (int i = 0; i < n; ++i) sys.A(base + n - 1, base + i) = -den.coeff(i);
    sys.B(base + n - 1, col) = 1.0;
  }
  for (Eigen::Index row = 0; row < m.rows(); ++row) {
    const RationalFunction& f = m(row, col);
    if (f.is_zero()) continue;
    std::vector<Complex> extra;
    for (std::size_t k = 0; k < shared.size(); ++k)
      if (!used[static_cast<std::size_t>(row)][k]) extra.push_back(shared[k]);
    const Polynomial num = f.num() * Polynomial::from_roots(extra) * (1.0 / f.den().leading());
    auto [q, r] = num.divmod(den);
    sys.D(row, col) = q.coeff(0);
    for (int i = 0; i < n; ++i) sys.C(row, base + i) = r.coeff(i);
  }
}

}  // namespace

Eigen::MatrixXcd StateSpace::evaluate(Complex x) const {
  const Eigen::Index n = states();
  if (n == 0) return D.cast<Complex>();
  const Eigen::MatrixXcd resolvent =
      (x * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>()).partialPivLu().solve(B.cast<Complex>());
  return C.cast<Complex>() * resolvent + D.cast<Complex>();
}

StateSpace realize(const RationalMatrix& m) {
  StateSpace sys;
  sys.domain = m.domain();
  sys.A.resize(0, 0);
  sys.B = Eigen::MatrixXd::Zero(0, m.cols());
  sys.C = Eigen::MatrixXd::Zero(m.rows(), 0);
  sys.D = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) append_column(m, j, sys);
  return sys;
}

StateSpace realize_controller(const TruncatedParam& tp) {
  tp.validate();
  const Eigen::Index p = tp.outputs();
  const Eigen::Index m = tp.inputs();
  const int N = tp.N;
  const double shift = tp.domain == Domain::discrete ? 0.0 : tp.a;
  const Eigen::Index n = p * N;

  // xi_i = sigma^-i v, chained so that xi_1 is driven by v.
  Eigen::MatrixXd chain = -shift * Eigen::MatrixXd::Identity(n, n);
  for (int i = 1; i < N; ++i) chain.block(i * p, (i - 1) * p, p, p) = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd drive = Eigen::MatrixXd::Zero(n, p);
  if (N > 0) drive.topRows(p).setIdentity();
  Eigen::MatrixXd Cx(p, n);
  Eigen::MatrixXd Cy(m, n);
  for (int i = 1; i <= N; ++i) {
    Cx.middleCols((i - 1) * p, p) = tp.X[static_cast<std::size_t>(i)];
    Cy.middleCols((i - 1) * p, p) = tp.Y[static_cast<std::size_t>(i)];
  }

  // v = X^-1 y, u = Y v.
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(tp.X.front());
  if (!lu.isInvertible()) throw SingularMatrixError("realize_controller: X[0] is singular");
  const Eigen::MatrixXd X0inv = lu.inverse();
  StateSpace sys;
  sys.domain = tp.domain;
  sys.A = chain - drive * X0inv * Cx;
  sys.B = drive * X0inv;
  sys.C = Cy - tp.Y.front() * X0inv * Cx;
  sys.D = tp.Y.front() * X0inv;
  return sys;
}

StateSpace minimal_realization(const StateSpace& sys, double tol) {
  const StateSpace reachable = project(sys, reachable_basis<Eigen::MatrixXd>(sys.A, sys.B, tol));
  const Eigen::MatrixXd observable =
      reachable_basis<Eigen::MatrixXd>(reachable.A.transpose(), reachable.C.transpose(), tol);
  return project(reachable, observable);
}

StateSpace feedback_interconnection(const StateSpace& G, const StateSpace& K) {
  if (G.domain != K.domain) throw DomainMismatchError("feedback_interconnection: domains differ");
  if (K.inputs() != G.outputs() || K.outputs() != G.inputs())
    throw DimensionError("feedback_interconnection: controller must be m x p for a p x m plant");
  if (G.D.size() > 0 && G.D.cwiseAbs().maxCoeff() != 0.0)
    throw IllPosedError("feedback_interconnection: plant must be strictly proper");
  const Eigen::Index ng = G.states();
  const Eigen::Index nk = K.states();
  const Eigen::Index p = G.outputs();
  const Eigen::Index m = G.inputs();

  StateSpace cl;
  cl.domain = G.domain;
  cl.A.resize(ng + nk, ng + nk);
  cl.A << G.A + G.B * K.D * G.C, G.B * K.C, K.B * G.C, K.A;
  cl.B.resize(ng + nk, p + m);
  cl.B << G.B * K.D, G.B, K.B, Eigen::MatrixXd::Zero(nk, m);
  cl.C.resize(p + m, ng + nk);
  cl.C << G.C, Eigen::MatrixXd::Zero(p, nk), K.D * G.C, K.C;
  cl.D.resize(p + m, p + m);
  cl.D << Eigen::MatrixXd::Identity(p, p), Eigen::MatrixXd::Zero(p, m), K.D, Eigen::MatrixXd::Identity(m, m);
  return cl;
}

RationalMatrix transfer_matrix(const StateSpace& sys, double tol) {
  RationalMatrix out(sys.outputs(), sys.inputs(), sys.domain);
  for (Eigen::Index i = 0; i < sys.outputs(); ++i)
    for (Eigen::Index j = 0; j < sys.inputs(); ++j) {
      const StateSpace entry =
          minimal_realization({sys.domain, sys.A, sys.B.col(j), sys.C.row(i), sys.D.block(i, j, 1, 1)}, tol);
      const double d = entry.D(0, 0);
      if (entry.states() == 0) {
        out(i, j) = RationalFunction(d);
        continue;
      }
      const Eigen::VectorXcd eig = entry.A.eigenvalues();
      const double radius = 1.5 * std::max(1.0, eig.cwiseAbs().maxCoeff());
      // Off-circle probes score each candidate; the widest merge within a
      // decade of the best fit, or below 1e-10, wins.
      std::vector<std::pair<Complex, Complex>> probes;
      for (const double r : {0.55, 0.85, 1.2})
        for (const double angle : {0.37, 1.91, 2.83}) {
          const Complex x = std::polar(r * radius, angle);
          probes.emplace_back(x, entry.evaluate(x)(0, 0));
        }
      std::vector<std::pair<RationalFunction, double>> fits;
      double best = std::numeric_limits<double>::infinity();
      for (const double tol : kClusterRadii) {
        const std::vector<Complex> poles = merge_clusters({eig.data(), eig.data() + eig.size()}, tol);
        RationalFunction f = interpolate(entry, poles, radius);
        // Refit against the poles that survive cancellation.
        if (f.poles().size() < poles.size() && !f.poles().empty()) f = interpolate(entry, f.poles(), radius);
        double err = 0.0;
        for (const auto& [x, h] : probes) err = std::max(err, std::abs(f(x) - h) / std::max(1.0, std::abs(h)));
        best = std::min(best, err);
        fits.emplace_back(std::move(f), err);
      }
      for (auto it = fits.rbegin(); it != fits.rend(); ++it)
        if (it->second <= std::max(10.0 * best, 1e-10)) {
          out(i, j) = it->first;
          break;
        }
    }
  return out;
}

RationalMatrix right_divide(const RationalMatrix& N, const RationalMatrix& D) {
  if (N.domain() != D.domain()) throw DomainMismatchError("right_divide: domains differ");
  if (D.rows() != D.cols() || N.cols() != D.rows()) throw DimensionError("right_divide: shapes do not conform");
  const Eigen::Index p = D.rows();
  const Eigen::Index m = N.rows();
  RationalMatrix stacked(p + m, p, D.domain());
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) stacked(i, j) = D(i, j);
    for (Eigen::Index i = 0; i < m; ++i) stacked(p + i, j) = N(i, j);
  }
  if (properness_class(stacked) != Properness::improper) {
    // v = D^-1 y through the shared states, then u = N v.
    const StateSpace nd = minimal_realization(realize(stacked));
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(nd.D.topRows(p));
    if (lu.isInvertible()) {
      const Eigen::MatrixXd Dinv = lu.inverse();
      const Eigen::MatrixXd Cd = nd.C.topRows(p);
      const Eigen::MatrixXd Cn = nd.C.bottomRows(m);
      const Eigen::MatrixXd Dn = nd.D.bottomRows(m);
      const StateSpace q{D.domain(), nd.A - nd.B * Dinv * Cd, nd.B * Dinv, Cn - Dn * Dinv * Cd, Dn * Dinv};
      return transfer_matrix(minimal_realization(q));
    }
  }
  return N * inverse(D);
}

std::vector<Complex> transfer_poles(const StateSpace& sys, double tol) {
  const Eigen::Index n = sys.states();
  std::vector<Complex> out;
  if (n > 0) {
    // Reordered Schur form with the unstable eigenvalues leading, then a
    // Sylvester decoupling so each part is tested for hidden modes on its own.
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(sys.A.cast<Complex>());
    Eigen::MatrixXcd T = schur.matrixT();
    Eigen::MatrixXcd U = schur.matrixU();
    auto unstable = [&](Eigen::Index k) { return !is_stable_pole(T(k, k), sys.domain); };
    for (bool moved = true; moved;) {
      moved = false;
      for (Eigen::Index k = 0; k + 1 < n; ++k)
        if (!unstable(k) && unstable(k + 1)) {
          swap_adjacent(T, U, k);
          moved = true;
        }
    }
    Eigen::Index nu = 0;
    while (nu < n && unstable(nu)) ++nu;
    const Eigen::Index ns = n - nu;

    // T11 X - X T22 = -T12, solved column by column.
    const Eigen::MatrixXcd T11 = T.topLeftCorner(nu, nu);
    const Eigen::MatrixXcd T22 = T.bottomRightCorner(ns, ns);
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(nu, ns);
    for (Eigen::Index j = 0; j < ns; ++j) {
      Eigen::VectorXcd rhs = -T.block(0, nu + j, nu, 1);
      if (j > 0) rhs += X.leftCols(j) * T22.col(j).head(j);
      const Eigen::MatrixXcd shifted = T11 - T22(j, j) * Eigen::MatrixXcd::Identity(nu, nu);
      X.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    const Eigen::MatrixXcd Bt = U.adjoint() * sys.B.cast<Complex>();
    const Eigen::MatrixXcd Ct = sys.C.cast<Complex>() * U;
    const Eigen::MatrixXcd Bu = Bt.topRows(nu) - X * Bt.bottomRows(ns);
    const Eigen::MatrixXcd Cs = Ct.leftCols(nu) * X + Ct.rightCols(ns);
    // Both parts are tested against the scale of the full system.
    const double scale = std::max({1.0, sys.A.norm(), sys.B.norm(), sys.C.norm()});
    auto part = [&](const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& C) {
      const double local = std::max({1.0, A.norm(), B.norm(), C.norm()});
      return minimal_eigenvalues(A, B, C, tol * scale / local);
    };
    out = part(T11, Bu, Ct.leftCols(nu));
    const auto stable = part(T22, Bt.bottomRows(ns), Cs);
    out.insert(out.end(), stable.begin(), stable.end());
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

}  // namespace iop
