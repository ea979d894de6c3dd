#include "v2xsched/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace v2xsched {

CostMatrix::CostMatrix(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows < 0 || cols < 0) throw AssignmentError("negative matrix dimension");
}

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != cols_) throw AssignmentError("ragged cost matrix");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

namespace {

constexpr int kDummy = -1;

// Moves assignments inside the tight subgraph of an optimal dual solution so
// that the column sequence becomes lexicographically minimal. Unmatched
// columns are treated as held by interchangeable zero-cost dummy rows, which
// may take any column whose potential is zero.
class LexRefiner {
 public:
  LexRefiner(const std::vector<double>& cost, int n, int m, const std::vector<double>& u,
             const std::vector<double>& v, double tol, std::vector<int>& col_of_row)
      : cost_(cost), n_(n), m_(m), u_(u), v_(v), tol_(tol), a_(col_of_row) {}

  void run() {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < a_[i]; ++j) {
        if (!tight(i, j)) continue;
        if (try_move(i, j)) break;
      }
      fixed_up_to_ = i + 1;
    }
  }

 private:
  bool tight(int r, int c) const {
    return cost_[static_cast<std::size_t>(r) * m_ + c] - u_[r + 1] - v_[c + 1] <= tol_;
  }
  bool dummy_tight(int c) const { return v_[c + 1] >= -tol_; }

  bool try_move(int i, int j) {
    owner_.assign(m_, kDummy);
    for (int r = 0; r < n_; ++r) owner_[a_[r]] = r;
    seen_col_.assign(m_, false);
    seen_row_.assign(n_, false);
    dummy_seen_ = false;
    target_ = a_[i];
    mover_ = i;
    seen_col_[j] = true;
    if (!relocate(owner_[j])) return false;
    a_[i] = j;
    return true;
  }

  // `node` just lost its column; find it a new one, ending on the column the
  // moving row vacated.
  bool relocate(int node) {
    if (node == kDummy) {
      if (dummy_seen_) return false;
      dummy_seen_ = true;
      for (int c = 0; c < m_; ++c) {
        if (seen_col_[c] || !dummy_tight(c)) continue;
        if (c == target_) return true;
        const int o = owner_[c];
        if (o == kDummy) continue;
        seen_col_[c] = true;
        if (relocate(o)) return true;
      }
      return false;
    }
    if (node < fixed_up_to_ || node == mover_ || seen_row_[node]) return false;
    seen_row_[node] = true;
    for (int c = 0; c < m_; ++c) {
      if (seen_col_[c] || !tight(node, c)) continue;
      seen_col_[c] = true;
      if (c == target_ || relocate(owner_[c])) {
        a_[node] = c;
        return true;
      }
    }
    return false;
  }

  const std::vector<double>& cost_;
  int n_, m_;
  const std::vector<double>& u_;
  const std::vector<double>& v_;
  double tol_;
  std::vector<int>& a_;

  std::vector<int> owner_;
  std::vector<char> seen_col_, seen_row_;
  bool dummy_seen_ = false;
  int target_ = 0;
  int mover_ = 0;
  int fixed_up_to_ = 0;
};

}  // namespace

Assignment solve_min(const CostMatrix& input) {
  const int n = input.rows();
  const int m = input.cols();
  if (n > m) {
    throw AssignmentError("batch of " + std::to_string(n) + " rows exceeds " + std::to_string(m) +
                          " columns; split the batch");
  }
  Assignment result;
  if (n == 0) return result;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < n; ++r) {
    bool any = false;
    for (int c = 0; c < m; ++c) {
      const double x = input(r, c);
      if (x == CostMatrix::kForbidden) continue;
      if (!std::isfinite(x)) {
        throw AssignmentError("non-finite cost at (" + std::to_string(r) + ", " + std::to_string(c) + ")");
      }
      any = true;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (!any) throw AssignmentError("row " + std::to_string(r) + " is infeasible: every edge is forbidden");
  }

  const double magnitude = std::max({std::abs(lo), std::abs(hi), hi - lo});
  const double unit = hi > lo ? hi - lo : (magnitude > 0 ? magnitude : 1.0);
  // Any assignment using a forbidden edge costs more than every assignment avoiding them.
  const double big = hi + 2.0 * (n + 1) * unit;
  const double tol = 1e-9 * (magnitude > 0 ? magnitude : 1.0);

  std::vector<double> cost(static_cast<std::size_t>(n) * m);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) {
      const double x = input(r, c);
      cost[static_cast<std::size_t>(r) * m + c] = x == CostMatrix::kForbidden ? big : x;
    }
  }

  // Shortest augmenting path with potentials; 1-based, column 0 is the root.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      const double* row = &cost[static_cast<std::size_t>(i0 - 1) * m];
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = row[j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  result.column_of_row.assign(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j]) result.column_of_row[p[j] - 1] = j - 1;
  }
  for (int r = 0; r < n; ++r) {
    if (input.forbidden(r, result.column_of_row[r])) {
      throw AssignmentError("no assignment avoids the forbidden edges");
    }
  }

  LexRefiner(cost, n, m, u, v, tol, result.column_of_row).run();

  for (int r = 0; r < n; ++r) result.total += input(r, result.column_of_row[r]);
  return result;
}

Assignment solve_max(const CostMatrix& weight) {
  double top = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < weight.rows(); ++r) {
    for (int c = 0; c < weight.cols(); ++c) {
      if (!weight.forbidden(r, c)) top = std::max(top, weight(r, c));
    }
  }
  CostMatrix cost(weight.rows(), weight.cols());
  for (int r = 0; r < weight.rows(); ++r) {
    for (int c = 0; c < weight.cols(); ++c) {
      cost(r, c) = weight.forbidden(r, c) ? CostMatrix::kForbidden : top - weight(r, c);
    }
  }
  Assignment result = solve_min(cost);
  result.total = 0;
  for (int r = 0; r < weight.rows(); ++r) result.total += weight(r, result.column_of_row[r]);
  return result;
}

}  // namespace v2xsched
