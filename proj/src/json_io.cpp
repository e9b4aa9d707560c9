#include "iop/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "iop/errors.hpp"

namespace iop::io {

namespace {

const Json& field(const Json& j, const char* key, const char* what) {
  if (!j.is_object()) throw ParseError(std::string(what) + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string(what) + ": missing field '" + key + "'");
  return *it;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string(what) + ": non-finite number");
  return v;
}

Eigen::Index count(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ParseError(std::string(what) + ": expected a non-negative integer");
  return static_cast<Eigen::Index>(j.get<long long>());
}

Polynomial decode_polynomial(const Json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected a coefficient list");
  std::vector<double> c;
  c.reserve(j.size());
  for (const auto& v : j) c.push_back(number(v, what));
  return Polynomial(std::move(c));
}

Json encode_polynomial(const Polynomial& p) {
  Json out = Json::array();
  for (double c : p.coeffs()) out.push_back(c);
  if (out.empty()) out.push_back(0.0);
  return out;
}

Json encode_matrix(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd decode_matrix(const Json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ParseError(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(what) + ": expected " + std::to_string(cols) + " columns");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = number(row[static_cast<std::size_t>(c)], what);
  }
  return m;
}

Domain decode_domain(const Json& j) {
  if (!j.is_string()) throw ParseError("domain: expected \"s\" or \"z\"");
  try {
    return domain_from_string(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("domain: ") + e.what());
  }
}

Json encode_sequence(const std::vector<Eigen::MatrixXd>& seq) {
  Json out = Json::array();
  for (const auto& m : seq) out.push_back(encode_matrix(m));
  return out;
}

std::vector<Eigen::MatrixXd> decode_sequence(const Json& j, int N, Eigen::Index rows, Eigen::Index cols,
                                             const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != N + 1)
    throw ParseError(std::string(what) + ": expected N + 1 coefficient matrices");
  std::vector<Eigen::MatrixXd> out;
  for (const auto& m : j) out.push_back(decode_matrix(m, rows, cols, what));
  return out;
}

Eigen::Index leading_dimension(const Json& seq, const char* what) {
  if (!seq.is_array() || seq.empty() || !seq[0].is_array()) throw ParseError(std::string(what) + ": empty sequence");
  return static_cast<Eigen::Index>(seq[0].size());
}

}  // namespace

Json encode(const RationalMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({{"num", encode_polynomial(m(i, j).num())}, {"den", encode_polynomial(m(i, j).den())}});
    entries.push_back(std::move(row));
  }
  return {{"domain", std::string(to_string(m.domain()))}, {"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

RationalMatrix decode_rational_matrix(const Json& j) {
  const Domain d = decode_domain(field(j, "domain", "rational matrix"));
  const Eigen::Index rows = count(field(j, "rows", "rational matrix"), "rows");
  const Eigen::Index cols = count(field(j, "cols", "rational matrix"), "cols");
  const Json& entries = field(j, "entries", "rational matrix");
  if (!entries.is_array() || static_cast<Eigen::Index>(entries.size()) != rows)
    throw ParseError("rational matrix: entries must have 'rows' rows");
  RationalMatrix m(rows, cols, d);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = entries[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError("rational matrix: each row must have 'cols' entries");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      Polynomial num = decode_polynomial(field(e, "num", "entry"), "num");
      Polynomial den = decode_polynomial(field(e, "den", "entry"), "den");
      if (den.is_zero())
        throw ParseError("rational matrix: zero denominator at entry (" + std::to_string(i) + ", " +
                         std::to_string(c) + ")");
      m(i, c) = RationalFunction(std::move(num), std::move(den));
    }
  }
  return m;
}

Json encode(const TruncatedParam& tp) {
  Json out = {{"domain", std::string(to_string(tp.domain))}, {"N", tp.N},
              {"Xc", encode_sequence(tp.X)}, {"Yc", encode_sequence(tp.Y)},
              {"Wc", encode_sequence(tp.W)}, {"Zc", encode_sequence(tp.Z)}};
  if (tp.domain == Domain::continuous) out["a"] = tp.a;
  return out;
}

TruncatedParam decode_truncated_param(const Json& j) {
  TruncatedParam tp;
  tp.domain = decode_domain(field(j, "domain", "truncated parameter"));
  const Eigen::Index N = count(field(j, "N", "truncated parameter"), "N");
  tp.N = static_cast<int>(N);
  if (tp.domain == Domain::continuous) {
    tp.a = number(field(j, "a", "truncated parameter"), "a");
    if (!(tp.a > 0.0)) throw ParseError("truncated parameter: a must be positive");
  }
  const Json& Xc = field(j, "Xc", "truncated parameter");
  const Json& Zc = field(j, "Zc", "truncated parameter");
  const Eigen::Index p = leading_dimension(Xc, "Xc");
  const Eigen::Index m = leading_dimension(Zc, "Zc");
  tp.X = decode_sequence(Xc, tp.N, p, p, "Xc");
  tp.Y = decode_sequence(field(j, "Yc", "truncated parameter"), tp.N, m, p, "Yc");
  tp.W = decode_sequence(field(j, "Wc", "truncated parameter"), tp.N, p, m, "Wc");
  tp.Z = decode_sequence(Zc, tp.N, m, m, "Zc");
  return tp;
}

Json encode(const ClosedLoopQuad& quad) {
  return {{"X", encode(quad.X)}, {"Y", encode(quad.Y)}, {"W", encode(quad.W)}, {"Z", encode(quad.Z)}};
}

ClosedLoopQuad decode_quad(const Json& j) {
  ClosedLoopQuad quad;
  quad.X = decode_rational_matrix(field(j, "X", "quadruple"));
  quad.Y = decode_rational_matrix(field(j, "Y", "quadruple"));
  quad.W = decode_rational_matrix(field(j, "W", "quadruple"));
  quad.Z = decode_rational_matrix(field(j, "Z", "quadruple"));
  try {
    quad.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("quadruple: ") + e.what());
  }
  return quad;
}

Json encode(const DoublyCoprimeFactorization& dcf) {
  return {{"Ur", encode(dcf.Ur)}, {"Vr", encode(dcf.Vr)}, {"Ul", encode(dcf.Ul)}, {"Vl", encode(dcf.Vl)},
          {"Mr", encode(dcf.Mr)}, {"Ml", encode(dcf.Ml)}, {"Nr", encode(dcf.Nr)}, {"Nl", encode(dcf.Nl)}};
}

DoublyCoprimeFactorization decode_dcf(const Json& j) {
  DoublyCoprimeFactorization f;
  f.Ur = decode_rational_matrix(field(j, "Ur", "factorization"));
  f.Vr = decode_rational_matrix(field(j, "Vr", "factorization"));
  f.Ul = decode_rational_matrix(field(j, "Ul", "factorization"));
  f.Vl = decode_rational_matrix(field(j, "Vl", "factorization"));
  f.Mr = decode_rational_matrix(field(j, "Mr", "factorization"));
  f.Ml = decode_rational_matrix(field(j, "Ml", "factorization"));
  f.Nr = decode_rational_matrix(field(j, "Nr", "factorization"));
  f.Nl = decode_rational_matrix(field(j, "Nl", "factorization"));
  try {
    f.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("factorization: ") + e.what());
  }
  return f;
}

Json encode(const SparsityPattern& s) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < s.cols(); ++j) row.push_back(s.mask()(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

SparsityPattern decode_pattern(const Json& j) {
  const Json& rows = j.is_object() ? field(j, "pattern", "sparsity pattern") : j;
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw ParseError("sparsity pattern: expected a non-empty list of rows");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXi mask(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      throw ParseError("sparsity pattern: rows have different lengths");
    for (Eigen::Index k = 0; k < c; ++k) {
      const Json& v = row[static_cast<std::size_t>(k)];
      if (v.is_boolean()) {
        mask(i, k) = v.get<bool>() ? 1 : 0;
      } else if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) {
        mask(i, k) = v.get<int>();
      } else {
        throw ParseError("sparsity pattern: entries must be 0 or 1");
      }
    }
  }
  return SparsityPattern(mask);
}

Weights decode_weights(const Json& j) {
  return {decode_rational_matrix(field(j, "Pzw", "weights")), decode_rational_matrix(field(j, "Pzu", "weights")),
          decode_rational_matrix(field(j, "Pyw", "weights"))};
}

Json encode(const EqualitySystem& sys) {
  Json triplets = Json::array();
  for (Eigen::Index r = 0; r < sys.A.outerSize(); ++r)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.A, r); it; ++it)
      triplets.push_back({it.row(), it.col(), it.value()});
  Json b = Json::array();
  for (Eigen::Index i = 0; i < sys.b.size(); ++i) b.push_back(sys.b(i));
  Json variables = Json::array();
  for (Eigen::Index c = 0; c < sys.layout.size(); ++c) {
    const VariableKey k = sys.layout.key(c);
    std::ostringstream name;
    name << to_string(k.block) << '[' << k.index << "](" << k.row << ',' << k.col << ')';
    variables.push_back(name.str());
  }
  Json out = {{"rows", sys.A.rows()}, {"cols", sys.A.cols()}, {"triplets", triplets},
              {"b", b},           {"variables", variables}, {"domain", std::string(to_string(sys.domain))}};
  if (sys.domain == Domain::continuous) out["a"] = sys.a;
  return out;
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace iop::io
