#include "iop/rational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "iop/errors.hpp"

namespace iop {

namespace {

bool roots_coincide(Complex a, Complex b) { return std::abs(a - b) <= kCancelTolerance * (1.0 + std::abs(a)); }

// True when (x - r) is, to the cancellation tolerance, a factor of num. The
// Newton ratio |num/num'| estimates the distance from r to the nearest root
// of num (divided by the multiplicity for clustered roots).
bool has_root_near(const Polynomial& num, const Polynomial& dnum, Complex r) {
  const Complex v = num(r);
  if (v == Complex{0.0}) return true;
  return std::abs(v) <= kCancelTolerance * (1.0 + std::abs(r)) * std::abs(dnum(r));
}

// Greedy nearest matching. Returns the entries of `pool` not claimed by any
// entry of `items`, and (optionally) the entries of `items` left unmatched.
void match_roots(const std::vector<Complex>& pool, const std::vector<Complex>& items, std::vector<Complex>* pool_rest,
                 std::vector<Complex>* items_rest) {
  std::vector<bool> used(pool.size(), false);
  for (const Complex& r : items) {
    std::size_t best = pool.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      if (used[j] || !roots_coincide(pool[j], r)) continue;
      const double d = std::abs(pool[j] - r);
      if (best == pool.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best < pool.size()) {
      used[best] = true;
    } else if (items_rest) {
      items_rest->push_back(r);
    }
  }
  if (pool_rest) {
    for (std::size_t j = 0; j < pool.size(); ++j)
      if (!used[j]) pool_rest->push_back(pool[j]);
  }
}

// Sum of numerators scaled onto a shared denominator, with coefficients that
// cancelled to rounding level set to exactly zero.
struct ScaledSum {
  Polynomial num;
  double term_scale = 0.0;
  double raw_max = 0.0;
};

ScaledSum sum_over_common_denominator(const std::vector<const RationalFunction*>& terms,
                                      const std::vector<Complex>& lcm) {
  std::vector<double> acc;
  std::vector<double> mag;
  ScaledSum out;
  for (const RationalFunction* t : terms) {
    if (t->is_zero()) continue;
    std::vector<Complex> rest;
    match_roots(lcm, t->poles(), &rest, nullptr);
    const Polynomial factor = Polynomial::from_roots(rest);
    const Polynomial scaled = t->num() * factor;
    const std::vector<double> bound = abs_product(t->num(), factor);
    out.term_scale = std::max(out.term_scale, scaled.max_abs());
    if (scaled.coeffs().size() > acc.size()) {
      acc.resize(scaled.coeffs().size(), 0.0);
      mag.resize(scaled.coeffs().size(), 0.0);
    }
    for (std::size_t k = 0; k < scaled.coeffs().size(); ++k) {
      acc[k] += scaled.coeffs()[k];
      mag[k] += bound[k];
    }
  }
  for (std::size_t k = 0; k < acc.size(); ++k) {
    out.raw_max = std::max(out.raw_max, std::abs(acc[k]));
    if (std::abs(acc[k]) <= kChopTolerance * mag[k]) acc[k] = 0.0;
  }
  out.num = Polynomial(std::move(acc));
  return out;
}

std::vector<Complex> least_common_poles(const std::vector<const RationalFunction*>& terms) {
  std::vector<Complex> lcm;
  for (const RationalFunction* t : terms) {
    if (t->is_zero()) continue;
    std::vector<Complex> extra;
    match_roots(lcm, t->poles(), nullptr, &extra);
    lcm.insert(lcm.end(), extra.begin(), extra.end());
  }
  return lcm;
}

void require_same_shape(const RationalMatrix& a, const RationalMatrix& b, const char* op) {
  if (a.domain() != b.domain()) throw DomainMismatchError(std::string(op) + ": domain mismatch");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError(std::string(op) + ": dimension mismatch");
}

}  // namespace

std::string_view to_string(Domain d) { return d == Domain::continuous ? "s" : "z"; }

Domain domain_from_string(std::string_view tag) {
  if (tag == "s") return Domain::continuous;
  if (tag == "z") return Domain::discrete;
  throw std::invalid_argument("unknown domain tag '" + std::string(tag) + "' (expected \"s\" or \"z\")");
}

std::string_view to_string(Properness p) {
  switch (p) {
    case Properness::strictly_proper:
      return "strictly_proper";
    case Properness::proper:
      return "proper";
    case Properness::improper:
      return "improper";
  }
  return "improper";
}

bool is_stable_pole(Complex pole, Domain d) {
  if (d == Domain::discrete) return std::abs(pole) < 1.0 - kStabilityMargin;
  return pole.real() < -kStabilityMargin;
}

// ---------------------------------------------------------------------------
// RationalFunction

RationalFunction::RationalFunction(double c) {
  if (c != 0.0) num_ = Polynomial::constant(c);
}

RationalFunction::RationalFunction(Polynomial num, Polynomial den) {
  if (den.is_zero()) throw std::invalid_argument("RationalFunction: zero denominator");
  if (num.is_zero()) return;
  poles_ = den.roots();
  num_ = std::move(num) * (1.0 / den.leading());
  cancel_common_roots();
  rebuild_den();
}

RationalFunction RationalFunction::from_poles(Polynomial num, std::vector<Complex> poles) {
  RationalFunction f;
  if (num.is_zero()) return f;
  f.num_ = std::move(num);
  f.poles_ = std::move(poles);
  f.cancel_common_roots();
  f.rebuild_den();
  return f;
}

void RationalFunction::cancel_common_roots() {
  if (num_.is_zero()) {
    poles_.clear();
    return;
  }
  // Exact factors of the variable first.
  const int shared_origin = [&] {
    const int v = num_.valuation();
    int count = 0;
    for (const Complex& p : poles_)
      if (p == Complex{0.0}) ++count;
    return std::min(v, count);
  }();
  if (shared_origin > 0) {
    num_ = Polynomial(std::vector<double>(num_.coeffs().begin() + shared_origin, num_.coeffs().end()));
    int removed = 0;
    std::erase_if(poles_, [&](const Complex& p) { return p == Complex{0.0} && removed++ < shared_origin; });
  }

  Polynomial dnum = num_.derivative();
  for (std::size_t i = 0; i < poles_.size() && num_.degree() > 0;) {
    const Complex r = poles_[i];
    if (r.imag() < 0.0) {
      ++i;
      continue;
    }
    if (r.imag() > 0.0 && num_.degree() < 2) {
      ++i;
      continue;
    }
    if (!has_root_near(num_, dnum, r)) {
      ++i;
      continue;
    }
    num_ = num_.deflated(r);
    dnum = num_.derivative();
    poles_.erase(poles_.begin() + static_cast<std::ptrdiff_t>(i));
    if (r.imag() > 0.0) {
      auto partner = std::min_element(poles_.begin(), poles_.end(), [&](const Complex& a, const Complex& b) {
        const bool a_lower = a.imag() < 0.0;
        const bool b_lower = b.imag() < 0.0;
        if (a_lower != b_lower) return a_lower;
        return std::abs(a - std::conj(r)) < std::abs(b - std::conj(r));
      });
      if (partner != poles_.end() && partner->imag() < 0.0) {
        if (std::distance(poles_.begin(), partner) < static_cast<std::ptrdiff_t>(i)) --i;
        poles_.erase(partner);
      }
    }
  }
}

void RationalFunction::rebuild_den() { den_ = Polynomial::from_roots(poles_); }

int RationalFunction::relative_degree() const {
  if (is_zero()) return 1 << 20;
  return den_.degree() - num_.degree();
}

Properness RationalFunction::properness() const {
  const int rd = relative_degree();
  if (rd > 0) return Properness::strictly_proper;
  if (rd == 0) return Properness::proper;
  return Properness::improper;
}

bool RationalFunction::is_stable(Domain d) const {
  return std::all_of(poles_.begin(), poles_.end(), [d](Complex p) { return is_stable_pole(p, d); });
}

Complex RationalFunction::operator()(Complex x) const {
  if (is_zero()) return Complex{0.0};
  return num_(x) / den_(x);
}

RationalFunction RationalFunction::reciprocal() const {
  if (is_zero()) throw std::domain_error("RationalFunction::reciprocal: zero function");
  RationalFunction out;
  out.poles_ = num_.roots();
  out.num_ = den_ * (1.0 / num_.leading());
  out.cancel_common_roots();
  out.rebuild_den();
  return out;
}

RationalFunction RationalFunction::operator-() const {
  RationalFunction out(*this);
  out.num_ = -out.num_;
  return out;
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const std::vector<const RationalFunction*> terms{&a, &b};
  std::vector<Complex> lcm = least_common_poles(terms);
  ScaledSum sum = sum_over_common_denominator(terms, lcm);
  return RationalFunction::from_poles(std::move(sum.num), std::move(lcm));
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Complex> poles = a.poles();
  poles.insert(poles.end(), b.poles().begin(), b.poles().end());
  return RationalFunction::from_poles(a.num() * b.num(), std::move(poles));
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) { return a * b.reciprocal(); }

double residual_norm(const std::vector<RationalFunction>& terms) {
  std::vector<const RationalFunction*> ptrs;
  for (const auto& t : terms)
    if (!t.is_zero()) ptrs.push_back(&t);
  if (ptrs.empty()) return 0.0;
  const std::vector<Complex> lcm = least_common_poles(ptrs);
  const ScaledSum sum = sum_over_common_denominator(ptrs, lcm);
  if (sum.num.is_zero()) return 0.0;
  return sum.num.max_abs() / sum.term_scale;
}

// ---------------------------------------------------------------------------
// RationalMatrix

RationalMatrix::RationalMatrix(Eigen::Index rows, Eigen::Index cols, Domain domain)
    : rows_(rows), cols_(cols), domain_(domain), entries_(static_cast<std::size_t>(rows * cols)) {
  if (rows < 0 || cols < 0) throw DimensionError("RationalMatrix: negative dimension");
}

RationalMatrix RationalMatrix::zero(Eigen::Index rows, Eigen::Index cols, Domain domain) {
  return RationalMatrix(rows, cols, domain);
}

RationalMatrix RationalMatrix::identity(Eigen::Index n, Domain domain) {
  RationalMatrix out(n, n, domain);
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = RationalFunction(1.0);
  return out;
}

RationalMatrix RationalMatrix::constant(const Eigen::MatrixXd& m, Domain domain) {
  RationalMatrix out(m.rows(), m.cols(), domain);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = RationalFunction(m(i, j));
  return out;
}

RationalMatrix RationalMatrix::blocks(const RationalMatrix& a, const RationalMatrix& b, const RationalMatrix& c,
                                      const RationalMatrix& d) {
  if (a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols())
    throw DimensionError("RationalMatrix::blocks: inconsistent block shapes");
  for (const RationalMatrix* m : {&b, &c, &d})
    if (m->domain() != a.domain()) throw DomainMismatchError("RationalMatrix::blocks: domain mismatch");
  RationalMatrix out(a.rows() + c.rows(), a.cols() + b.cols(), a.domain());
  auto place = [&out](const RationalMatrix& m, Eigen::Index r0, Eigen::Index c0) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out(r0 + i, c0 + j) = m(i, j);
  };
  place(a, 0, 0);
  place(b, 0, a.cols());
  place(c, a.rows(), 0);
  place(d, a.rows(), a.cols());
  return out;
}

RationalFunction& RationalMatrix::operator()(Eigen::Index r, Eigen::Index c) {
  return entries_[static_cast<std::size_t>(r * cols_ + c)];
}

const RationalFunction& RationalMatrix::operator()(Eigen::Index r, Eigen::Index c) const {
  return entries_[static_cast<std::size_t>(r * cols_ + c)];
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix out(cols_, rows_, domain_);
  for (Eigen::Index i = 0; i < rows_; ++i)
    for (Eigen::Index j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

RationalMatrix RationalMatrix::block(Eigen::Index r0, Eigen::Index c0, Eigen::Index nr, Eigen::Index nc) const {
  if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_) throw DimensionError("RationalMatrix::block: out of range");
  RationalMatrix out(nr, nc, domain_);
  for (Eigen::Index i = 0; i < nr; ++i)
    for (Eigen::Index j = 0; j < nc; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
  return out;
}

Eigen::MatrixXcd RationalMatrix::evaluate(Complex x) const {
  Eigen::MatrixXcd out(rows_, cols_);
  for (Eigen::Index i = 0; i < rows_; ++i)
    for (Eigen::Index j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j)(x);
  return out;
}

bool RationalMatrix::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const RationalFunction& f) { return f.is_zero(); });
}

RationalMatrix RationalMatrix::operator-() const {
  RationalMatrix out(*this);
  for (auto& e : out.entries_) e = -e;
  return out;
}

RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
  require_same_shape(a, b, "add");
  RationalMatrix out(a.rows(), a.cols(), a.domain());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
  require_same_shape(a, b, "subtract");
  RationalMatrix out(a.rows(), a.cols(), a.domain());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.domain() != b.domain()) throw DomainMismatchError("multiply: domain mismatch");
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions disagree");
  RationalMatrix out(a.rows(), b.cols(), a.domain());
  std::vector<RationalFunction> products;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      products.clear();
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
        products.push_back(a(i, k) * b(k, j));
      }
      if (products.empty()) continue;
      // Accumulate over one common denominator rather than pairwise, so the
      // chop threshold sees every term of the entry.
      std::vector<const RationalFunction*> ptrs;
      for (const auto& p : products) ptrs.push_back(&p);
      std::vector<Complex> lcm = least_common_poles(ptrs);
      ScaledSum sum = sum_over_common_denominator(ptrs, lcm);
      out(i, j) = RationalFunction::from_poles(std::move(sum.num), std::move(lcm));
    }
  }
  return out;
}

RationalMatrix operator*(const RationalFunction& s, const RationalMatrix& a) {
  RationalMatrix out(a.rows(), a.cols(), a.domain());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  return out;
}

RationalMatrix inverse(const RationalMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("inverse: matrix is not square");
  const Eigen::Index n = a.rows();
  RationalMatrix work(a);
  RationalMatrix inv = RationalMatrix::identity(n, a.domain());
  // Generic probe point used to rank pivot candidates.
  const Complex probe{0.3719, 0.8513};

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = -1;
    double best = 0.0;
    for (Eigen::Index r = k; r < n; ++r) {
      if (work(r, k).is_zero()) continue;
      const double mag = std::abs(work(r, k)(probe));
      if (pivot < 0 || mag > best) {
        pivot = r;
        best = mag;
      }
    }
    if (pivot < 0) throw SingularMatrixError("inverse: determinant vanishes identically");
    // Keep the diagonal pivot unless it is much weaker; this preserves
    // triangular structure.
    if (!work(k, k).is_zero() && std::abs(work(k, k)(probe)) >= 1e-3 * best) pivot = k;
    if (pivot != k) {
      for (Eigen::Index j = 0; j < n; ++j) {
        std::swap(work(k, j), work(pivot, j));
        std::swap(inv(k, j), inv(pivot, j));
      }
    }

    const RationalFunction pinv = work(k, k).reciprocal();
    work(k, k) = RationalFunction(1.0);
    for (Eigen::Index j = k + 1; j < n; ++j)
      if (!work(k, j).is_zero()) work(k, j) = work(k, j) * pinv;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!inv(k, j).is_zero()) inv(k, j) = inv(k, j) * pinv;

    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == k || work(r, k).is_zero()) continue;
      const RationalFunction f = work(r, k);
      work(r, k) = RationalFunction();
      for (Eigen::Index j = k + 1; j < n; ++j)
        if (!work(k, j).is_zero()) work(r, j) = work(r, j) - f * work(k, j);
      for (Eigen::Index j = 0; j < n; ++j)
        if (!inv(k, j).is_zero()) inv(r, j) = inv(r, j) - f * inv(k, j);
    }
  }
  return inv;
}

std::vector<Complex> poles(const RationalMatrix& a) {
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const auto& p = a(i, j).poles();
      out.insert(out.end(), p.begin(), p.end());
    }
  return out;
}

bool is_stable(const RationalMatrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (!a(i, j).is_stable(a.domain())) return false;
  return true;
}

Properness properness_class(const RationalMatrix& a) {
  bool all_strict = true;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const Properness p = a(i, j).properness();
      if (p == Properness::improper) return Properness::improper;
      if (p == Properness::proper) all_strict = false;
    }
  }
  return all_strict ? Properness::strictly_proper : Properness::proper;
}

double max_residual(const RationalMatrix& lhs, const RationalMatrix& rhs) {
  require_same_shape(lhs, rhs, "residual");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < lhs.rows(); ++i)
    for (Eigen::Index j = 0; j < lhs.cols(); ++j)
      worst = std::max(worst, residual_norm({lhs(i, j), -rhs(i, j)}));
  return worst;
}

void ClosedLoopQuad::validate() const {
  const Eigen::Index p = X.rows();
  const Eigen::Index m = Z.rows();
  if (X.cols() != p || Z.cols() != m || Y.rows() != m || Y.cols() != p || W.rows() != p || W.cols() != m)
    throw DimensionError("ClosedLoopQuad: blocks do not conform to a p-output, m-input plant");
  const Domain d = X.domain();
  if (Y.domain() != d || W.domain() != d || Z.domain() != d)
    throw DomainMismatchError("ClosedLoopQuad: blocks carry different domain tags");
}

}  // namespace iop
