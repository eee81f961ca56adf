#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vocabadapt/error.hpp"
#include "vocabadapt/tokenizer.hpp"

namespace vocabadapt {

/// Row i is the embedding of token id i.
template <typename Scalar>
using EmbeddingMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using EmbeddingMatrixXd = EmbeddingMatrix<double>;

/// Ids of the base-tokenizer subwords that make up `token`. Pieces outside
/// the base vocabulary have no embedding and are left out.
inline std::vector<TokenId> base_subword_ids(const Tokenizer& base, const std::string& token) {
  std::vector<TokenId> ids;
  for (const auto& piece : base.segment(token)) {
    if (auto id = base.id(piece)) ids.push_back(*id);
  }
  if (ids.empty()) throw DataError("token \"" + token + "\" has no subword in the base vocabulary");
  return ids;
}

/// Appends one row per token that `extended` adds on top of `base`. Each new
/// row is the mean of the rows of the token's base-tokenizer subwords, so
/// rows never chain through other new tokens. Existing rows are copied
/// unchanged. The same call serves input and output embeddings.
template <typename Derived>
EmbeddingMatrix<typename Derived::Scalar> extend_matrix(const Eigen::MatrixBase<Derived>& m, const Tokenizer& base,
                                                        const Tokenizer& extended) {
  using Scalar = typename Derived::Scalar;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  const auto n = static_cast<Eigen::Index>(base.size());
  if (m.rows() != n) {
    throw DataError("matrix has " + std::to_string(m.rows()) + " rows but the base vocab has " +
                    std::to_string(base.size()) + " tokens");
  }
  if (extended.size() < base.size()) throw DataError("extended tokenizer is smaller than the base");
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (extended.tokens()[i] != base.tokens()[i]) {
      throw DataError("extended vocab does not keep base id " + std::to_string(i) + " (\"" + base.tokens()[i] + "\")");
    }
  }

  EmbeddingMatrix<Scalar> out(static_cast<Eigen::Index>(extended.size()), m.cols());
  out.topRows(n) = m;
  for (std::size_t id = base.size(); id < extended.size(); ++id) {
    const auto subwords = base_subword_ids(base, extended.tokens()[id]);
    Row mean = m.row(subwords.front());
    Row lo = mean;
    Row hi = mean;
    // Running mean: identical rows reproduce the row bit for bit.
    for (std::size_t k = 1; k < subwords.size(); ++k) {
      const Row x = m.row(subwords[k]);
      mean += (x - mean) / static_cast<Scalar>(k + 1);
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    out.row(static_cast<Eigen::Index>(id)) = mean.cwiseMax(lo).cwiseMin(hi);
  }
  return out;
}

/// Text format: "N D" on the first line, then N lines of D values with 17 significant digits.
template <typename Derived>
std::string format_matrix(const Eigen::MatrixBase<Derived>& m) {
  std::string out = std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), static_cast<double>(m(r, c)),
                                     std::chars_format::general, 17);
      if (c > 0) out += ' ';
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

template <typename Scalar = double>
EmbeddingMatrix<Scalar> parse_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("matrix file is empty");
  long long rows = -1;
  long long cols = -1;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> rows >> cols) || rows < 0 || cols < 0 || (header >> extra)) {
      throw DataError("matrix header must be \"N D\", got \"" + line + "\"");
    }
  }
  EmbeddingMatrix<Scalar> m(rows, cols);
  long long r = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (r >= rows) throw DataError("matrix has more than the " + std::to_string(rows) + " rows its header declares");
    std::istringstream fields(line);
    std::string field;
    long long c = 0;
    while (fields >> field) {
      if (c >= cols) throw DataError("matrix row " + std::to_string(r) + " has more than " + std::to_string(cols) + " values");
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw DataError("matrix row " + std::to_string(r) + ": bad value \"" + field + "\"");
      }
      m(r, c++) = static_cast<Scalar>(v);
    }
    if (c != cols) {
      throw DataError("matrix row " + std::to_string(r) + " has " + std::to_string(c) + " values, expected " +
                      std::to_string(cols));
    }
    ++r;
  }
  if (r != rows) throw DataError("matrix header declares " + std::to_string(rows) + " rows, found " + std::to_string(r));
  return m;
}

template <typename Scalar = double>
EmbeddingMatrix<Scalar> load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open matrix file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_matrix<Scalar>(ss.str());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

template <typename Derived>
void save_matrix(const Eigen::MatrixBase<Derived>& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write matrix file " + path.string());
  out << format_matrix(m);
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace vocabadapt
