#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace v2xsched {

// Dense rows x cols matrix, rows <= cols. Entries equal to kForbidden mark
// edges that may never be selected.
class CostMatrix {
 public:
  static constexpr double kForbidden = std::numeric_limits<double>::infinity();

  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0);
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  void forbid(int r, int c) { (*this)(r, c) = kForbidden; }
  bool forbidden(int r, int c) const { return (*this)(r, c) == kForbidden; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  std::vector<int> column_of_row;
  double total = 0;  // sum of the selected original entries
};

class AssignmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact minimum-cost rectangular assignment (shortest augmenting path
// Hungarian, O(n^2 m)). Among optimal assignments the one whose column
// sequence, read in row order, is lexicographically smallest is returned.
// Throws AssignmentError when rows > cols, on a row with only forbidden
// entries, or when no assignment avoids forbidden edges.
Assignment solve_min(const CostMatrix& cost);

// Maximum-weight counterpart: solves min over (max_entry - w). `total` is the
// summed weight.
Assignment solve_max(const CostMatrix& weight);

}  // namespace v2xsched
