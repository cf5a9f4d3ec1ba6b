#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpboost/tape.hpp"

namespace hpboost {

/// Job shop with unit tasks: n jobs, each a permutation of machines 1..m.
struct JssInstance {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<std::vector<int>> perms;  // perms[i][j] = machine of task j+1 of job i

  void validate() const;  // throws std::invalid_argument
  int machine(std::size_t job, int done) const { return perms[job][static_cast<std::size_t>(done)]; }

  std::string to_json() const;
  static JssInstance from_json(const std::string& text);
  static JssInstance random(std::size_t n, std::size_t m, RandomTape& tape);
};

/// Grid point: number of finished tasks per job.
using GridPoint = std::vector<int>;

/// Moves are bitmasks over jobs; bit i advances job i by one task.
using Move = std::uint32_t;

/// True when every job in the move is unfinished and their next machines are
/// pairwise distinct.
bool move_feasible(const JssInstance& inst, const GridPoint& at, Move move);

/// Blocked diagonal cells for two jobs, 1-based (i, j) with P_1[i] = P_2[j].
std::vector<std::pair<int, int>> obstacle_cells(const JssInstance& inst);

/// Start points with exactly one zero coordinate and the others in 1..r,
/// in lexicographic order. Requires 1 <= r < m.
std::vector<GridPoint> enumerate_diagonals(std::size_t n, std::size_t m, std::size_t r);

/// Time-indexed template for start point d and radius r:
/// T(t)_i = clamp(t - (r - d_i), 0, m) for t = 0..m+r. Job i idles r - d_i
/// steps, then walks the diagonal, then idles d_i steps at the end.
struct DiagonalTemplate {
  std::size_t r = 0;
  GridPoint start;

  std::vector<GridPoint> points(std::size_t m) const;
};

struct Schedule {
  std::vector<Move> moves;  // one per time step; 0 is an idle step
  std::size_t makespan = 0;
  std::size_t delays = 0;   // extra steps spent on detours

  /// Feasible moves only and ends at (m,...,m).
  bool valid(const JssInstance& inst) const;
};

/// Follows the template; a blocked template step is replaced by the shortest
/// sequence of feasible moves reaching the next template point (breadth-first
/// over the jobs still to advance, lower job indices first).
Schedule diagonal_strategy_run(const JssInstance& inst, const DiagonalTemplate& tmpl);

/// Shortest schedule visiting every template point in order, by a
/// breadth-first search over (point, next template index). Oracle only.
std::size_t shortest_template_path(const JssInstance& inst, const DiagonalTemplate& tmpl);

/// Uniform diagonal with coordinates at most r, then its strategy.
Schedule algorithm_R(const JssInstance& inst, std::size_t r, RandomTape& tape,
                     GridPoint* chosen = nullptr);

struct DelayCensus {
  std::vector<GridPoint> diagonals;
  std::vector<std::size_t> delays;
  std::size_t total = 0;
  double total_bound = 0;  // m C(n,2) (n-1) r^(n-2)
  double threshold = 0;    // m f - r
  std::size_t bad = 0;     // diagonals with delays > threshold
  double bad_bound = 0;    // total / (m f - r), infinite when the threshold is <= 0

  bool total_ok() const { return static_cast<double>(total) <= total_bound; }
  bool bad_ok() const { return static_cast<double>(bad) <= bad_bound; }
};

DelayCensus delay_census(const JssInstance& inst, std::size_t r, double f);

/// Optimal makespan by breadth-first search over grid points.
std::size_t jss_exact_opt(const JssInstance& inst);

/// Number of diagonal start points.
std::uint64_t diagonal_count(std::size_t n, std::size_t r);  // n r^(n-1)

}  // namespace hpboost
