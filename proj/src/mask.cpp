#include "mgcomm/mask.hpp"

#include <algorithm>
#include <sstream>

#include "mgcomm/error.hpp"

namespace mgcomm {

SparsityMask::SparsityMask(int rows, int cols, bool value)
    : rows_(rows), cols_(cols), bits_(static_cast<std::size_t>(rows) * cols, value ? 1 : 0) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::kDimension, "negative mask size");
}

SparsityMask SparsityMask::from_rows(const std::vector<std::vector<int>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
  SparsityMask m(r, c);
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) throw Error(ErrorCode::kDimension, "ragged mask rows");
    for (int j = 0; j < c; ++j) {
      if (rows[i][j] != 0 && rows[i][j] != 1)
        throw Error(ErrorCode::kParse, "mask entries must be 0 or 1");
      m.set(i, j, rows[i][j] != 0);
    }
  }
  return m;
}

SparsityMask SparsityMask::identity(int n) {
  SparsityMask m(n, n);
  for (int i = 0; i < n; ++i) m.set(i, i);
  return m;
}

std::size_t SparsityMask::index(int i, int j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
    throw Error(ErrorCode::kDimension, "mask index out of range");
  return static_cast<std::size_t>(i) * cols_ + j;
}

int SparsityMask::popcount() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

int SparsityMask::row_sum(int i) const {
  int s = 0;
  for (int j = 0; j < cols_; ++j) s += (*this)(i, j);
  return s;
}

int SparsityMask::col_sum(int j) const {
  int s = 0;
  for (int i = 0; i < rows_; ++i) s += (*this)(i, j);
  return s;
}

bool SparsityMask::subset_of(const SparsityMask& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  for (std::size_t k = 0; k < bits_.size(); ++k)
    if (bits_[k] && !other.bits_[k]) return false;
  return true;
}

std::vector<std::vector<int>> SparsityMask::to_rows() const {
  std::vector<std::vector<int>> out(rows_, std::vector<int>(cols_));
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

std::string SparsityMask::to_csv() const {
  std::ostringstream os;
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) os << (j ? "," : "") << ((*this)(i, j) ? 1 : 0);
    os << '\n';
  }
  return os.str();
}

SparsityMask SparsityMask::from_csv(const std::string& text) {
  std::vector<std::vector<int>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<int> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) throw Error(ErrorCode::kParse, "empty mask cell");
      const std::string v = cell.substr(b, e - b + 1);
      if (v != "0" && v != "1") throw Error(ErrorCode::kParse, "mask cell '" + v + "' is not 0/1");
      row.push_back(v == "1");
    }
    rows.push_back(std::move(row));
  }
  return from_rows(rows);
}

std::string SparsityMask::key() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

bool operator<(const SparsityMask& a, const SparsityMask& b) {
  if (a.rows_ != b.rows_) return a.rows_ < b.rows_;
  if (a.cols_ != b.cols_) return a.cols_ < b.cols_;
  return a.bits_ < b.bits_;
}

}  // namespace mgcomm
