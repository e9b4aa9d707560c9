#include "iop/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "iop/basis.hpp"
#include "iop/errors.hpp"

namespace iop {

namespace {

using SparseRow = std::map<Eigen::Index, double>;

// One scalar residual entry: sum_t weight_t * var_t + offset * I, with the
// weights rational functions of the plant.
struct ResidualTerm {
  RationalFunction weight;
  Block block;
  Eigen::Index row;
  Eigen::Index col;
};

struct Assembler {
  const VariableLayout& layout;
  int N;
  std::vector<Polynomial> powers;  // sigma^(N - l), l = 0..N
  Polynomial sigma_N;
  std::vector<SparseRow> rows;
  std::vector<double> rhs;

  // Residual  sum_t w_t * V_t - offset = 0, multiplied through by D * sigma^N
  // where D is the least common denominator of the weights.
  void add_entry(const std::vector<ResidualTerm>& terms, double offset) {
    std::vector<Complex> lcm;
    for (const auto& t : terms) {
      std::vector<Complex> extra;
      // Reuse the pole-matching rule of the rational arithmetic.
      std::vector<Complex> pool = lcm;
      std::vector<bool> used(pool.size(), false);
      for (const Complex& r : t.weight.poles()) {
        bool matched = false;
        for (std::size_t j = 0; j < pool.size(); ++j) {
          if (!used[j] && std::abs(pool[j] - r) <= kCancelTolerance * (1.0 + std::abs(r))) {
            used[j] = matched = true;
            break;
          }
        }
        if (!matched) extra.push_back(r);
      }
      lcm.insert(lcm.end(), extra.begin(), extra.end());
    }
    const Polynomial D = Polynomial::from_roots(lcm);
    const int length = D.degree() + N + 1;
    std::vector<SparseRow> local(static_cast<std::size_t>(length));
    std::vector<double> local_rhs(static_cast<std::size_t>(length), 0.0);

    for (const auto& t : terms) {
      if (t.weight.is_zero()) continue;
      // D / den(w) via the unmatched part of the common poles.
      std::vector<Complex> rest = lcm;
      for (const Complex& r : t.weight.poles()) {
        if (rest.empty()) throw std::logic_error("assemble: denominator is not covered by the common poles");
        auto it = std::min_element(rest.begin(), rest.end(),
                                   [&](const Complex& x, const Complex& y) { return std::abs(x - r) < std::abs(y - r); });
        rest.erase(it);
      }
      const Polynomial factor = Polynomial::from_roots(rest) * t.weight.num();
      for (int l = 0; l <= N; ++l) {
        const Polynomial contrib = factor * powers[static_cast<std::size_t>(l)];
        const Eigen::Index col = layout.column({t.block, l, t.row, t.col});
        for (int k = 0; k <= contrib.degree(); ++k) {
          const double v = contrib.coeffs()[static_cast<std::size_t>(k)];
          if (v != 0.0) local[static_cast<std::size_t>(k)][col] += v;
        }
      }
    }
    if (offset != 0.0) {
      const Polynomial c = offset * (D * sigma_N);
      for (int k = 0; k <= c.degree(); ++k) local_rhs[static_cast<std::size_t>(k)] += c.coeffs()[static_cast<std::size_t>(k)];
    }
    for (std::size_t k = 0; k < local.size(); ++k) {
      rows.push_back(std::move(local[k]));
      rhs.push_back(local_rhs[k]);
    }
  }
};

}  // namespace

// ---------------------------------------------------------------------------

SparsityPattern::SparsityPattern(Eigen::MatrixXi mask) : mask_(std::move(mask)) {
  for (Eigen::Index i = 0; i < mask_.size(); ++i)
    if (mask_.data()[i] != 0 && mask_.data()[i] != 1)
      throw std::invalid_argument("SparsityPattern: entries must be 0 or 1");
}

SparsityPattern SparsityPattern::full(Eigen::Index rows, Eigen::Index cols) {
  return SparsityPattern(Eigen::MatrixXi::Ones(rows, cols));
}

SparsityPattern SparsityPattern::lower_triangular(Eigen::Index n) {
  Eigen::MatrixXi mask = Eigen::MatrixXi::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) mask(i, j) = 1;
  return SparsityPattern(std::move(mask));
}

SparsityPattern SparsityPattern::support_of(const RationalMatrix& m) {
  Eigen::MatrixXi mask(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) mask(i, j) = m(i, j).is_zero() ? 0 : 1;
  return SparsityPattern(std::move(mask));
}

double off_pattern_magnitude(const RationalMatrix& m, const SparsityPattern& s) {
  if (m.rows() != s.rows() || m.cols() != s.cols()) throw DimensionError("off_pattern_magnitude: shape mismatch");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!s.allows(i, j) && !m(i, j).is_zero()) worst = std::max(worst, m(i, j).num().max_abs() / m(i, j).den().max_abs());
  return worst;
}

std::string_view to_string(Block b) {
  switch (b) {
    case Block::X:
      return "X";
    case Block::Y:
      return "Y";
    case Block::W:
      return "W";
    case Block::Z:
      return "Z";
  }
  return "?";
}

VariableLayout::VariableLayout(Eigen::Index p, Eigen::Index m, int N) : p_(p), m_(m), N_(N) {
  total_ = static_cast<Eigen::Index>(N + 1) * (p * p + m * p + p * m + m * m);
}

Eigen::Index VariableLayout::block_rows(Block b) const { return (b == Block::X || b == Block::W) ? p_ : m_; }

Eigen::Index VariableLayout::block_cols(Block b) const { return (b == Block::X || b == Block::Y) ? p_ : m_; }

Eigen::Index VariableLayout::block_offset(Block b) const {
  const Eigen::Index n = N_ + 1;
  switch (b) {
    case Block::X:
      return 0;
    case Block::Y:
      return n * p_ * p_;
    case Block::W:
      return n * (p_ * p_ + m_ * p_);
    case Block::Z:
      return n * (p_ * p_ + m_ * p_ + p_ * m_);
  }
  return 0;
}

Eigen::Index VariableLayout::column(const VariableKey& key) const {
  const Eigen::Index r = block_rows(key.block);
  const Eigen::Index c = block_cols(key.block);
  if (key.index < 0 || key.index > N_ || key.row < 0 || key.row >= r || key.col < 0 || key.col >= c)
    throw std::out_of_range("VariableLayout::column: key out of range");
  return block_offset(key.block) + key.index * r * c + key.row * c + key.col;
}

VariableKey VariableLayout::key(Eigen::Index column) const {
  if (column < 0 || column >= total_) throw std::out_of_range("VariableLayout::key: column out of range");
  for (Block b : {Block::Z, Block::W, Block::Y, Block::X}) {
    const Eigen::Index off = block_offset(b);
    if (column < off) continue;
    const Eigen::Index r = block_rows(b);
    const Eigen::Index c = block_cols(b);
    const Eigen::Index local = column - off;
    const Eigen::Index index = local / (r * c);
    const Eigen::Index within = local % (r * c);
    return {b, static_cast<int>(index), within / c, within % c};
  }
  throw std::logic_error("VariableLayout::key: unreachable");
}

EqualitySystem assemble(const RationalMatrix& G, int N, std::optional<double> a,
                        const std::optional<SparsityPattern>& sparsity) {
  if (N < 1) throw std::invalid_argument("assemble: truncation order N must be at least 1");
  const Domain domain = G.domain();
  if (domain == Domain::continuous) {
    if (!a || !(*a > 0.0)) throw std::invalid_argument("assemble: continuous-time plants need a > 0");
  } else if (a) {
    throw std::invalid_argument("assemble: the pole shift a only applies to continuous-time plants");
  }
  if (properness_class(G) != Properness::strictly_proper)
    throw ImproperPlantError("assemble: plant must be strictly proper");
  const Eigen::Index p = G.rows();
  const Eigen::Index m = G.cols();
  if (sparsity && (sparsity->rows() != m || sparsity->cols() != p))
    throw DimensionError("assemble: sparsity pattern must be m x p");

  EqualitySystem sys;
  sys.domain = domain;
  sys.a = a.value_or(0.0);
  sys.layout = VariableLayout(p, m, N);

  Assembler asmb{sys.layout, N, {}, {}, {}, {}};
  const Polynomial sigma = basis_sigma(domain, sys.a);
  for (int l = 0; l <= N; ++l) asmb.powers.push_back(Polynomial::shifted_power(sigma.coeff(0), N - l));
  asmb.sigma_N = asmb.powers.front();

  std::vector<ResidualTerm> terms;
  // X - I - GY
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      terms = {{RationalFunction(1.0), Block::X, i, j}};
      for (Eigen::Index k = 0; k < m; ++k)
        if (!G(i, k).is_zero()) terms.push_back({-G(i, k), Block::Y, k, j});
      asmb.add_entry(terms, i == j ? 1.0 : 0.0);
    }
  // W - GZ
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      terms = {{RationalFunction(1.0), Block::W, i, j}};
      for (Eigen::Index k = 0; k < m; ++k)
        if (!G(i, k).is_zero()) terms.push_back({-G(i, k), Block::Z, k, j});
      asmb.add_entry(terms, 0.0);
    }
  // -XG + W
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      terms = {{RationalFunction(1.0), Block::W, i, j}};
      for (Eigen::Index k = 0; k < p; ++k)
        if (!G(k, j).is_zero()) terms.push_back({-G(k, j), Block::X, i, k});
      asmb.add_entry(terms, 0.0);
    }
  // -YG + Z - I
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      terms = {{RationalFunction(1.0), Block::Z, i, j}};
      for (Eigen::Index k = 0; k < p; ++k)
        if (!G(k, j).is_zero()) terms.push_back({-G(k, j), Block::Y, i, k});
      asmb.add_entry(terms, i == j ? 1.0 : 0.0);
    }
  if (sparsity) {
    for (int l = 0; l <= N; ++l)
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index k = 0; k < p; ++k)
          if (!sparsity->allows(j, k)) {
            asmb.rows.push_back({{sys.layout.column({Block::Y, l, j, k}), 1.0}});
            asmb.rhs.push_back(0.0);
          }
  }

  // Scale to unit max magnitude with a positive leading entry, drop empty
  // rows and duplicates.
  std::set<std::vector<std::pair<Eigen::Index, long long>>> seen;
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> b;
  for (std::size_t r = 0; r < asmb.rows.size(); ++r) {
    SparseRow& row = asmb.rows[r];
    double rhs = asmb.rhs[r];
    std::erase_if(row, [](const auto& kv) { return kv.second == 0.0; });
    double scale = 0.0;
    for (const auto& [col, v] : row) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
      if (rhs == 0.0) continue;
      scale = std::abs(rhs);
    }
    const double sign = (!row.empty() && row.begin()->second < 0.0) || (row.empty() && rhs < 0.0) ? -1.0 : 1.0;
    std::vector<std::pair<Eigen::Index, long long>> fingerprint;
    for (auto& [col, v] : row) {
      v *= sign / scale;
      fingerprint.emplace_back(col, std::llround(v * 1e12));
    }
    rhs *= sign / scale;
    fingerprint.emplace_back(-1, std::llround(rhs * 1e12));
    if (!seen.insert(std::move(fingerprint)).second) continue;
    const auto out_row = static_cast<int>(b.size());
    for (const auto& [col, v] : row) triplets.emplace_back(out_row, static_cast<int>(col), v);
    b.push_back(rhs);
  }
  sys.A.resize(static_cast<Eigen::Index>(b.size()), sys.layout.size());
  sys.A.setFromTriplets(triplets.begin(), triplets.end());
  sys.b = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  return sys;
}

bool qi_check_sparsity(const SparsityPattern& controller, const SparsityPattern& plant) {
  if (controller.cols() != plant.rows() || plant.cols() != controller.rows())
    throw DimensionError("qi_check_sparsity: S_K must be m x p and S_G p x m");
  const Eigen::MatrixXi triple = controller.mask() * plant.mask() * controller.mask();
  for (Eigen::Index i = 0; i < triple.rows(); ++i)
    for (Eigen::Index j = 0; j < triple.cols(); ++j)
      if (triple(i, j) != 0 && !controller.allows(i, j)) return false;
  return true;
}

RationalMatrix h_G_map(const RationalMatrix& G, const RationalMatrix& K) {
  if (G.domain() != K.domain()) throw DomainMismatchError("h_G_map: domain mismatch");
  if (K.rows() != G.cols() || K.cols() != G.rows()) throw DimensionError("h_G_map: K must be m x p");
  try {
    return -(K * inverse(RationalMatrix::identity(G.rows(), G.domain()) - G * K));
  } catch (const SingularMatrixError&) {
    throw IllPosedError("h_G_map: (I - GK) is singular");
  }
}

}  // namespace iop
