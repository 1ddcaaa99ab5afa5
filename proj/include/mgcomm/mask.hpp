#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mgcomm {

// Zero pattern of a gain matrix: rows are controllers, columns are sensors.
class SparsityMask {
 public:
  SparsityMask() = default;
  SparsityMask(int rows, int cols, bool value = false);

  static SparsityMask from_rows(const std::vector<std::vector<int>>& rows);
  static SparsityMask identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool operator()(int i, int j) const { return bits_[index(i, j)] != 0; }
  void set(int i, int j, bool value = true) { bits_[index(i, j)] = value ? 1 : 0; }

  int popcount() const;
  int row_sum(int i) const;
  int col_sum(int j) const;
  bool empty() const { return popcount() == 0; }

  // True when every allowed entry of this mask is allowed in other.
  bool subset_of(const SparsityMask& other) const;

  std::vector<std::vector<int>> to_rows() const;
  std::string to_csv() const;
  static SparsityMask from_csv(const std::string& text);

  // Row-major 0/1 string, e.g. "0100110010010001".
  std::string key() const;

  friend bool operator==(const SparsityMask&, const SparsityMask&) = default;
  friend bool operator<(const SparsityMask& a, const SparsityMask& b);

 private:
  std::size_t index(int i, int j) const;

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace mgcomm
