#include "hpboost/jss.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hpboost/generators.hpp"
#include "hpboost/simulate.hpp"
#include "json.hpp"

namespace hpboost {

void JssInstance::validate() const {
  if (n < 2 || n > 16) throw std::invalid_argument("jss: need 2 <= n <= 16 jobs");
  if (m < 1) throw std::invalid_argument("jss: need m >= 1");
  if (perms.size() != n) throw std::invalid_argument("jss: need one permutation per job");
  for (const auto& p : perms) {
    if (p.size() != m) throw std::invalid_argument("jss: permutation of wrong length");
    std::vector<bool> seen(m + 1, false);
    for (int v : p) {
      if (v < 1 || v > static_cast<int>(m) || seen[static_cast<std::size_t>(v)]) {
        throw std::invalid_argument("jss: not a permutation of 1..m");
      }
      seen[static_cast<std::size_t>(v)] = true;
    }
  }
}

std::string JssInstance::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["m"] = m;
  j["permutations"] = perms;
  return j.dump();
}

JssInstance JssInstance::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  JssInstance inst;
  inst.n = j.at("n").get<std::size_t>();
  inst.m = j.at("m").get<std::size_t>();
  inst.perms = j.at("permutations").get<std::vector<std::vector<int>>>();
  inst.validate();
  return inst;
}

JssInstance JssInstance::random(std::size_t n, std::size_t m, RandomTape& tape) {
  JssInstance inst;
  inst.n = n;
  inst.m = m;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = random_permutation(m, tape);
    std::vector<int> perm(m);
    for (std::size_t j = 0; j < m; ++j) perm[j] = static_cast<int>(p[j]) + 1;
    inst.perms.push_back(std::move(perm));
  }
  inst.validate();
  return inst;
}

bool move_feasible(const JssInstance& inst, const GridPoint& at, Move move) {
  std::uint64_t used_lo = 0;
  std::vector<int> used;
  for (std::size_t i = 0; i < inst.n; ++i) {
    if ((move >> i & 1U) == 0) continue;
    if (at[i] >= static_cast<int>(inst.m)) return false;
    const int mach = inst.machine(i, at[i]);
    if (mach <= 64) {
      const std::uint64_t bit = 1ULL << (mach - 1);
      if (used_lo & bit) return false;
      used_lo |= bit;
    } else {
      if (std::find(used.begin(), used.end(), mach) != used.end()) return false;
      used.push_back(mach);
    }
  }
  return true;
}

std::vector<std::pair<int, int>> obstacle_cells(const JssInstance& inst) {
  if (inst.n != 2) throw std::invalid_argument("obstacle cells are listed for two jobs only");
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < inst.m; ++i) {
    for (std::size_t j = 0; j < inst.m; ++j) {
      if (inst.perms[0][i] == inst.perms[1][j]) {
        out.emplace_back(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
      }
    }
  }
  return out;
}

std::uint64_t diagonal_count(std::size_t n, std::size_t r) {
  std::uint64_t c = n;
  for (std::size_t i = 1; i < n; ++i) c *= r;
  return c;
}

std::vector<GridPoint> enumerate_diagonals(std::size_t n, std::size_t m, std::size_t r) {
  if (r < 1 || r >= m) throw std::invalid_argument("diagonals: need 1 <= r < m");
  if (n < 1) throw std::invalid_argument("diagonals: need n >= 1");
  std::vector<GridPoint> out;
  GridPoint p(n, 0);
  // Odometer over {0..r}^n, keeping points with exactly one zero.
  for (;;) {
    if (std::count(p.begin(), p.end(), 0) == 1) out.push_back(p);
    std::size_t i = n;
    while (i > 0 && p[i - 1] == static_cast<int>(r)) p[--i] = 0;
    if (i == 0) break;
    ++p[i - 1];
  }
  return out;
}

std::vector<GridPoint> DiagonalTemplate::points(std::size_t m) const {
  std::vector<GridPoint> out;
  const int mi = static_cast<int>(m);
  const int ri = static_cast<int>(r);
  for (int t = 0; t <= mi + ri; ++t) {
    GridPoint p(start.size());
    for (std::size_t i = 0; i < start.size(); ++i) p[i] = std::clamp(t - (ri - start[i]), 0, mi);
    out.push_back(std::move(p));
  }
  return out;
}

bool Schedule::valid(const JssInstance& inst) const {
  GridPoint at(inst.n, 0);
  for (Move mv : moves) {
    if (mv != 0 && !move_feasible(inst, at, mv)) return false;
    for (std::size_t i = 0; i < inst.n; ++i) at[i] += static_cast<int>(mv >> i & 1U);
  }
  return makespan == moves.size() &&
         std::all_of(at.begin(), at.end(), [&](int a) { return a == static_cast<int>(inst.m); });
}

namespace {

void check_template(const JssInstance& inst, const DiagonalTemplate& tmpl) {
  if (tmpl.start.size() != inst.n) throw std::invalid_argument("template: wrong dimension");
  if (tmpl.r < 1 || tmpl.r >= inst.m) throw std::invalid_argument("template: need 1 <= r < m");
  int zeros = 0;
  for (int c : tmpl.start) {
    if (c < 0 || c > static_cast<int>(tmpl.r)) throw std::invalid_argument("template: bad start");
    zeros += c == 0;
  }
  if (zeros != 1) throw std::invalid_argument("template: start needs exactly one zero");
}

Move step_mask(const GridPoint& a, const GridPoint& b) {
  Move m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b[i] != a[i]) m |= Move{1} << i;
  }
  return m;
}

/// Shortest sequence of feasible moves that advances exactly the jobs in
/// need, each once. Breadth-first over the subset already advanced.
std::vector<Move> local_detour(const JssInstance& inst, const GridPoint& from, Move need) {
  std::map<Move, std::pair<Move, Move>> parent;  // done -> (previous done, move)
  std::deque<Move> queue{0};
  parent[0] = {0, 0};
  while (!queue.empty()) {
    const Move done = queue.front();
    queue.pop_front();
    if (done == need) break;
    GridPoint at = from;
    for (std::size_t i = 0; i < inst.n; ++i) at[i] += static_cast<int>(done >> i & 1U);
    const Move rest = need & ~done;
    // Subsets of rest in increasing order.
    for (Move s = 1; s <= rest; ++s) {
      if ((s & ~rest) != 0 || !move_feasible(inst, at, s)) continue;
      const Move next = done | s;
      if (parent.count(next) != 0) continue;
      parent[next] = {done, s};
      queue.push_back(next);
    }
  }
  std::vector<Move> path;
  for (Move cur = need; cur != 0; cur = parent.at(cur).first) path.push_back(parent.at(cur).second);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

Schedule diagonal_strategy_run(const JssInstance& inst, const DiagonalTemplate& tmpl) {
  check_template(inst, tmpl);
  const auto pts = tmpl.points(inst.m);
  Schedule s;
  for (std::size_t t = 0; t + 1 < pts.size(); ++t) {
    const Move need = step_mask(pts[t], pts[t + 1]);
    if (need == 0 || move_feasible(inst, pts[t], need)) {
      s.moves.push_back(need);
      continue;
    }
    auto detour = local_detour(inst, pts[t], need);
    s.delays += detour.size() - 1;
    s.moves.insert(s.moves.end(), detour.begin(), detour.end());
  }
  s.makespan = s.moves.size();
  return s;
}

std::size_t shortest_template_path(const JssInstance& inst, const DiagonalTemplate& tmpl) {
  check_template(inst, tmpl);
  const auto pts = tmpl.points(inst.m);
  const std::size_t n = inst.n;
  // Node: (point, index of the next template point to visit).
  using Node = std::pair<GridPoint, std::size_t>;
  std::map<Node, std::size_t> dist;
  std::deque<Node> queue;
  Node start{pts[0], 1};
  dist[start] = 0;
  queue.push_back(start);
  while (!queue.empty()) {
    Node cur = queue.front();
    queue.pop_front();
    const std::size_t d = dist[cur];
    const auto& [p, next] = cur;
    if (next == pts.size()) return d;
    auto relax = [&](Node nb) {
      if (dist.emplace(nb, d + 1).second) queue.push_back(std::move(nb));
    };
    if (pts[next] == pts[next - 1] && p == pts[next]) {
      relax({p, next + 1});  // template idle step
      continue;
    }
    for (Move mv = 1; mv < (Move{1} << n); ++mv) {
      if (!move_feasible(inst, p, mv)) continue;
      GridPoint q = p;
      bool inside = true;
      for (std::size_t i = 0; i < n; ++i) {
        q[i] += static_cast<int>(mv >> i & 1U);
        if (q[i] > pts[next][i]) inside = false;
      }
      if (!inside) continue;
      relax({q, q == pts[next] ? next + 1 : next});
    }
  }
  throw std::logic_error("template path search found no path");
}

Schedule algorithm_R(const JssInstance& inst, std::size_t r, RandomTape& tape, GridPoint* chosen) {
  const auto diagonals = enumerate_diagonals(inst.n, inst.m, r);
  const auto& d = diagonals[tape.uniform(diagonals.size())];
  if (chosen != nullptr) *chosen = d;
  return diagonal_strategy_run(inst, DiagonalTemplate{r, d});
}

DelayCensus delay_census(const JssInstance& inst, std::size_t r, double f) {
  if (inst.n > 3 || inst.m > 60) throw BudgetExceeded("delay census limited to n <= 3, m <= 60");
  DelayCensus c;
  c.diagonals = enumerate_diagonals(inst.n, inst.m, r);
  for (const auto& d : c.diagonals) {
    const auto s = diagonal_strategy_run(inst, DiagonalTemplate{r, d});
    c.delays.push_back(s.delays);
    c.total += s.delays;
  }
  const double n = static_cast<double>(inst.n);
  const double m = static_cast<double>(inst.m);
  const double rr = static_cast<double>(r);
  c.total_bound = m * (n * (n - 1) / 2.0) * (n - 1) * std::pow(rr, n - 2);
  c.threshold = m * f - rr;
  for (auto d : c.delays) c.bad += static_cast<double>(d) > c.threshold;
  c.bad_bound = c.threshold > 0 ? static_cast<double>(c.total) / c.threshold
                                : std::numeric_limits<double>::infinity();
  return c;
}

std::size_t jss_exact_opt(const JssInstance& inst) {
  inst.validate();
  const std::size_t n = inst.n;
  const std::size_t side = inst.m + 1;
  double cells = std::pow(static_cast<double>(side), static_cast<double>(n));
  if (n > 3 || cells > 1e7) throw BudgetExceeded("exact JSS search limited to n <= 3, m <= 30");
  std::vector<std::size_t> stride(n, 1);
  for (std::size_t i = 1; i < n; ++i) stride[i] = stride[i - 1] * side;
  const std::size_t total = stride[n - 1] * side;
  std::vector<std::int32_t> dist(total, -1);
  std::deque<std::size_t> queue{0};
  dist[0] = 0;
  GridPoint p(n);
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    if (idx == total - 1) return static_cast<std::size_t>(dist[idx]);
    for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<int>(idx / stride[i] % side);
    for (Move mv = 1; mv < (Move{1} << n); ++mv) {
      if (!move_feasible(inst, p, mv)) continue;
      std::size_t nb = idx;
      for (std::size_t i = 0; i < n; ++i) {
        if (mv >> i & 1U) nb += stride[i];
      }
      if (dist[nb] < 0) {
        dist[nb] = dist[idx] + 1;
        queue.push_back(nb);
      }
    }
  }
  throw std::logic_error("exact JSS search found no schedule");
}

}  // namespace hpboost
