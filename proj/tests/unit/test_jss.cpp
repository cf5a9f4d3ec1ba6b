#include <gtest/gtest.h>

#include <set>

#include "hpboost/jss.hpp"

using namespace hpboost;

namespace {

JssInstance make(std::vector<std::vector<int>> perms) {
  JssInstance j;
  j.n = perms.size();
  j.m = perms.front().size();
  j.perms = std::move(perms);
  j.validate();
  return j;
}

}  // namespace

TEST(Jss, DiagonalsForTwoJobsRadiusThree) {
  const auto d = enumerate_diagonals(2, 5, 3);
  const std::vector<GridPoint> want{{0, 1}, {0, 2}, {0, 3}, {1, 0}, {2, 0}, {3, 0}};
  EXPECT_EQ(d, want);
}

TEST(Jss, DiagonalCountByBruteForce) {
  for (std::size_t n : {2u, 3u}) {
    for (std::size_t r = 1; r <= 10; ++r) {
      // Count points of {0..r}^n with exactly one zero.
      std::uint64_t count = 0;
      std::vector<std::size_t> c(n, 0);
      while (true) {
        std::size_t zeros = 0;
        for (auto v : c) zeros += v == 0;
        count += zeros == 1;
        std::size_t i = 0;
        while (i < n && ++c[i] > r) c[i++] = 0;
        if (i == n) break;
      }
      EXPECT_EQ(diagonal_count(n, r), count);
      EXPECT_EQ(enumerate_diagonals(n, r + 1, r).size(), count);
    }
  }
}

TEST(Jss, TemplateShape) {
  const std::size_t m = 7, r = 3;
  for (const auto& d : enumerate_diagonals(3, m, r)) {
    DiagonalTemplate t{r, d};
    const auto pts = t.points(m);
    ASSERT_EQ(pts.size(), m + r + 1);
    EXPECT_EQ(pts.front(), GridPoint(3, 0));
    EXPECT_EQ(pts.back(), GridPoint(3, static_cast<int>(m)));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        const int step = pts[i][j] - pts[i - 1][j];
        EXPECT_TRUE(step == 0 || step == 1);
      }
    }
  }
}

TEST(Jss, ObstaclesForTwoJobs) {
  const auto inst = make({{1, 2, 3}, {3, 1, 2}});
  const auto cells = obstacle_cells(inst);
  std::set<std::pair<int, int>> got(cells.begin(), cells.end());
  std::set<std::pair<int, int>> want;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      if (inst.perms[0][i - 1] == inst.perms[1][j - 1]) want.insert({i, j});
    }
  }
  EXPECT_EQ(got, want);
}

TEST(Jss, ExactOptSmallCases) {
  // Identical orders force a one-step offset; shifted orders never collide.
  EXPECT_EQ(jss_exact_opt(make({{1, 2, 3, 4}, {1, 2, 3, 4}})), 5u);
  EXPECT_EQ(jss_exact_opt(make({{1, 2, 3, 4}, {2, 3, 4, 1}})), 4u);
  EXPECT_EQ(jss_exact_opt(make({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}})), 5u);
}

TEST(Jss, StrategyRunsAreValidAndTight) {
  RandomTape tape(17);
  for (int rep = 0; rep < 20; ++rep) {
    for (std::size_t n : {2u, 3u}) {
      const std::size_t m = 3 + tape.uniform(5);
      const auto inst = JssInstance::random(n, m, tape);
      const std::size_t r = 1 + tape.uniform(m - 1);
      const auto opt = jss_exact_opt(inst);
      for (const auto& d : enumerate_diagonals(n, m, r)) {
        DiagonalTemplate t{r, d};
        const auto s = diagonal_strategy_run(inst, t);
        ASSERT_TRUE(s.valid(inst));
        EXPECT_EQ(s.makespan, m + r + s.delays);
        EXPECT_GE(s.makespan, opt);
        EXPECT_EQ(s.makespan, shortest_template_path(inst, t));
      }
    }
  }
}

TEST(Jss, CensusWithinBound) {
  RandomTape tape(2);
  for (int rep = 0; rep < 10; ++rep) {
    const auto inst = JssInstance::random(3, 12, tape);
    const auto c = delay_census(inst, 4, 1.0);
    EXPECT_TRUE(c.total_ok());
    EXPECT_TRUE(c.bad_ok());
    std::size_t sum = 0;
    for (auto v : c.delays) sum += v;
    EXPECT_EQ(sum, c.total);
  }
}

TEST(Jss, AlgorithmRDrawsFromDiagonals) {
  RandomTape gen(4);
  const auto inst = JssInstance::random(2, 8, gen);
  const auto diags = enumerate_diagonals(2, 8, 3);
  for (std::uint64_t s = 0; s < 30; ++s) {
    RandomTape tape(s);
    GridPoint chosen;
    const auto sched = algorithm_R(inst, 3, tape, &chosen);
    EXPECT_NE(std::find(diags.begin(), diags.end(), chosen), diags.end());
    EXPECT_TRUE(sched.valid(inst));
  }
}

TEST(Jss, JsonRoundTripAndValidation) {
  RandomTape gen(9);
  const auto inst = JssInstance::random(3, 6, gen);
  const auto back = JssInstance::from_json(inst.to_json());
  EXPECT_EQ(back.perms, inst.perms);
  JssInstance bad = inst;
  bad.perms[0][0] = bad.perms[0][1];
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
