#pragma once

#include <filesystem>

#include <json.hpp>

#include "iop/basis.hpp"
#include "iop/constraints.hpp"
#include "iop/rational.hpp"
#include "iop/synthesis.hpp"
#include "iop/youla.hpp"

namespace iop::io {

using Json = nlohmann::json;

// All decoders throw ParseError on malformed input.

// {"domain": "z" | "s", "rows": p, "cols": m,
//  "entries": [[{"num": [a0, ...], "den": [b0, ...]}, ...], ...]}
Json encode(const RationalMatrix& m);
RationalMatrix decode_rational_matrix(const Json& j);

// {"domain", "N", "a", "Xc", "Yc", "Wc", "Zc"}; each coefficient matrix is
// a list of rows.
Json encode(const TruncatedParam& tp);
TruncatedParam decode_truncated_param(const Json& j);

// {"X", "Y", "W", "Z"} of rational matrices.
Json encode(const ClosedLoopQuad& quad);
ClosedLoopQuad decode_quad(const Json& j);

// Object of the eight named rational matrices.
Json encode(const DoublyCoprimeFactorization& dcf);
DoublyCoprimeFactorization decode_dcf(const Json& j);

// Bare list of 0/1 rows, or {"pattern": [...]}.
Json encode(const SparsityPattern& s);
SparsityPattern decode_pattern(const Json& j);

// {"Pzw", "Pzu", "Pyw"} of rational matrices.
Weights decode_weights(const Json& j);

// {"rows", "cols", "triplets": [[i, j, v], ...], "b": [...],
//  "variables": ["Y[3](1,0)", ...]}
Json encode(const EqualitySystem& sys);

Json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Json& j);

}  // namespace iop::io
