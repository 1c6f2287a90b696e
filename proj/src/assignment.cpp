// One-to-one assignment over sparse candidate cells.
//
// Each connected component of the candidate graph is solved as a square min-cost
// assignment of size rows+cols: real cells cost -score, every row has a private
// "unmatched" column and every column a private "unmatched" row, both priced high enough
// that one more real match always wins. The optimal duals then identify every optimal
// solution as a perfect matching on tight (zero reduced cost) edges, and a greedy pass over
// rows picks the lexicographically smallest one.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include "kgalign/matcher.hpp"

namespace kgalign {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Solution {
  std::vector<std::size_t> row_to_col;
  std::vector<double> u, v;  // a[i][j] - u[i] - v[j] >= 0, tight on the matching
};

// Shortest augmenting path Hungarian algorithm on a dense n x n cost matrix (min cost).
Solution hungarian_min(const std::vector<double>& cost, std::size_t n) {
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = kInf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double a = cost[(i0 - 1) * n + (j - 1)];
        if (a != kInf) {
          double cur = a - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Solution s;
  s.row_to_col.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) s.row_to_col[p[j] - 1] = j - 1;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  return s;
}

struct Component {
  std::vector<std::size_t> rows;  // original indices, ascending
  std::vector<std::size_t> cols;
  std::vector<ScoredCell> cells;
};

// Returns the chosen (row, col) pairs in original indices.
std::vector<IndexPair> solve_component(const Component& comp) {
  const std::size_t a = comp.rows.size(), b = comp.cols.size(), n = a + b;
  std::map<std::size_t, std::size_t> row_id, col_id;
  for (std::size_t i = 0; i < a; ++i) row_id[comp.rows[i]] = i;
  for (std::size_t j = 0; j < b; ++j) col_id[comp.cols[j]] = j;

  double scale = 0.0;
  for (const auto& c : comp.cells) scale = std::max(scale, std::abs(c.score));
  const double unmatched = (scale + 1.0) * static_cast<double>(n + 1);

  std::vector<double> cost(n * n, kInf);
  for (const auto& c : comp.cells) cost[row_id[c.row] * n + col_id[c.col]] = -c.score;
  for (std::size_t i = 0; i < a; ++i) cost[i * n + b + i] = unmatched;
  for (std::size_t j = 0; j < b; ++j) {
    cost[(a + j) * n + j] = unmatched;
    for (std::size_t k = b; k < n; ++k) cost[(a + j) * n + k] = 0.0;
  }

  Solution sol = hungarian_min(cost, n);
  const double eps = 1e-10 * unmatched;

  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double c = cost[i * n + j];
      if (c != kInf && c - sol.u[i] - sol.v[j] <= eps) tight[i].push_back(j);
    }

  std::vector<std::size_t> row_match = sol.row_to_col, col_match(n);
  for (std::size_t i = 0; i < n; ++i) col_match[row_match[i]] = i;
  std::vector<bool> fixed(n, false);

  // Move row r onto column x, repairing the displaced row along a tight alternating path
  // that avoids fixed rows.
  auto reassign = [&](std::size_t r, std::size_t x) -> bool {
    const std::size_t displaced = col_match[x];
    if (fixed[displaced]) return false;
    const std::size_t freed = row_match[r];
    std::vector<std::size_t> parent_col(n, n);  // column reached -> previous column (n = start)
    std::vector<bool> seen_row(n, false);
    std::deque<std::pair<std::size_t, std::size_t>> queue{{displaced, n}};
    seen_row[displaced] = true;
    seen_row[r] = true;
    std::vector<std::size_t> via(n, n);  // column -> row that reached it
    while (!queue.empty()) {
      auto [row, from_col] = queue.front();
      queue.pop_front();
      for (std::size_t y : tight[row]) {
        if (y == x || via[y] != n) continue;
        via[y] = row;
        parent_col[y] = from_col;
        if (y == freed) {
          // Unwind: each row on the path takes the column it reached.
          row_match[r] = x;
          col_match[x] = r;
          for (std::size_t col = y; col != n;) {
            std::size_t owner = via[col];
            std::size_t prev = parent_col[col];
            row_match[owner] = col;
            col_match[col] = owner;
            col = prev;
          }
          return true;
        }
        std::size_t next = col_match[y];
        if (fixed[next] || seen_row[next]) continue;
        seen_row[next] = true;
        queue.emplace_back(next, y);
      }
    }
    return false;
  };

  for (std::size_t r = 0; r < a; ++r) {
    std::vector<std::size_t> options;
    for (std::size_t j : tight[r])
      if (j < b) options.push_back(j);
    std::sort(options.begin(), options.end());
    options.push_back(b + r);
    for (std::size_t x : options) {
      if (row_match[r] == x || reassign(r, x)) {
        fixed[r] = true;
        break;
      }
    }
  }

  std::vector<IndexPair> out;
  for (std::size_t i = 0; i < a; ++i)
    if (row_match[i] < b) out.emplace_back(comp.rows[i], comp.cols[row_match[i]]);
  return out;
}

}  // namespace

PairSet assign_one_to_one(std::span<const ScoredCell> candidates) {
  // Deduplicate, keeping the best score per cell.
  std::map<IndexPair, double> cells;
  for (const auto& c : candidates) {
    if (!std::isfinite(c.score)) continue;
    auto [it, inserted] = cells.try_emplace({c.row, c.col}, c.score);
    if (!inserted) it->second = std::max(it->second, c.score);
  }
  if (cells.empty()) return {};

  // Connected components over row nodes and column nodes.
  std::map<std::size_t, std::size_t> row_node, col_node;
  for (const auto& [rc, s] : cells) {
    row_node.try_emplace(rc.first, 0);
    col_node.try_emplace(rc.second, 0);
  }
  std::size_t next = 0;
  for (auto& [k, id] : row_node) id = next++;
  for (auto& [k, id] : col_node) id = next++;
  std::vector<std::size_t> parent(next);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [rc, s] : cells) {
    std::size_t x = find(row_node[rc.first]), y = find(col_node[rc.second]);
    if (x != y) parent[std::max(x, y)] = std::min(x, y);
  }

  std::map<std::size_t, Component> comps;
  for (const auto& [row, id] : row_node) comps[find(id)].rows.push_back(row);
  for (const auto& [col, id] : col_node) comps[find(id)].cols.push_back(col);
  for (const auto& [rc, s] : cells)
    comps[find(row_node[rc.first])].cells.push_back({rc.first, rc.second, s});

  PairSet out;
  for (const auto& [root, comp] : comps)
    for (const auto& p : solve_component(comp)) out.insert(p);
  return out;
}

PairSet hungarian_assign(const SimilarityMatrix& m, const PairSet& candidates) {
  std::vector<ScoredCell> cells;
  cells.reserve(candidates.size());
  for (const auto& [i, j] : candidates) cells.push_back({i, j, m.at(i, j)});
  return assign_one_to_one(cells);
}

}  // namespace kgalign
