#pragma once

#include <compare>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "iop/rational.hpp"

namespace iop {

// Binary support pattern; entry (i, j) may be nonzero only where set.
class SparsityPattern {
 public:
  SparsityPattern() = default;
  explicit SparsityPattern(Eigen::MatrixXi mask);  // entries must be 0 or 1

  static SparsityPattern full(Eigen::Index rows, Eigen::Index cols);
  static SparsityPattern lower_triangular(Eigen::Index n);
  // Support of a rational matrix (nonzero entries).
  static SparsityPattern support_of(const RationalMatrix& m);

  Eigen::Index rows() const { return mask_.rows(); }
  Eigen::Index cols() const { return mask_.cols(); }
  bool allows(Eigen::Index i, Eigen::Index j) const { return mask_(i, j) != 0; }
  const Eigen::MatrixXi& mask() const { return mask_; }

  bool operator==(const SparsityPattern& other) const { return mask_ == other.mask_; }

 private:
  Eigen::MatrixXi mask_;
};

// Largest off-pattern numerator coefficient, relative to the largest
// denominator coefficient of the same entry (0 when m lies in Sparse(S)).
double off_pattern_magnitude(const RationalMatrix& m, const SparsityPattern& s);

enum class Block { X, Y, W, Z };

std::string_view to_string(Block b);

struct VariableKey {
  Block block;
  int index;  // basis power i = 0..N
  Eigen::Index row;
  Eigen::Index col;
  auto operator<=>(const VariableKey&) const = default;
};

// Column layout of the stacked coefficients: blocks X, Y, W, Z in order,
// then basis index, then row-major entries.
class VariableLayout {
 public:
  VariableLayout() = default;
  VariableLayout(Eigen::Index p, Eigen::Index m, int N);

  Eigen::Index size() const { return total_; }
  Eigen::Index column(const VariableKey& key) const;
  VariableKey key(Eigen::Index column) const;

  Eigen::Index outputs() const { return p_; }
  Eigen::Index inputs() const { return m_; }
  int order() const { return N_; }

 private:
  Eigen::Index block_rows(Block b) const;
  Eigen::Index block_cols(Block b) const;
  Eigen::Index block_offset(Block b) const;

  Eigen::Index p_ = 0;
  Eigen::Index m_ = 0;
  int N_ = 0;
  Eigen::Index total_ = 0;
};

struct EqualitySystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
  VariableLayout layout;
  Domain domain = Domain::discrete;
  double a = 0.0;
};

// Encodes X - I - GY = 0, W - GZ = 0, -XG + W = 0 and -YG + Z - I = 0 for
// truncated parameters by matching numerator coefficients over the common
// denominator of each residual entry. Rows forcing Y[i]_jk = 0 off the
// sparsity pattern are appended when a pattern is given. Rows are scaled to
// unit max magnitude and duplicates dropped.
EqualitySystem assemble(const RationalMatrix& G, int N, std::optional<double> a = std::nullopt,
                        const std::optional<SparsityPattern>& sparsity = std::nullopt);

// Structural QI test: the boolean product S_K S_G S_K is supported in S_K.
bool qi_check_sparsity(const SparsityPattern& controller, const SparsityPattern& plant);

// h_G(K) = -K (I - GK)^-1.
RationalMatrix h_G_map(const RationalMatrix& G, const RationalMatrix& K);

}  // namespace iop
