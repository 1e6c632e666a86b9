#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "spb/parallel.hpp"

using namespace spb;

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); }, 4);
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(
        100,
        [](std::size_t i) {
          if (i == 17 || i == 60 || i == 99) throw std::runtime_error(std::to_string(i));
        },
        4);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}

TEST(ParallelFor, ZeroCountIsNoop) {
  parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(ThreadBudget, ReadsEnvironment) {
  ::setenv("SUBSPACE_PERTURB_THREADS", "3", 1);
  EXPECT_EQ(thread_budget(), 3u);
  ::setenv("SUBSPACE_PERTURB_THREADS", "0", 1);
  EXPECT_GE(thread_budget(), 1u);
  ::setenv("SUBSPACE_PERTURB_THREADS", "junk", 1);
  EXPECT_GE(thread_budget(), 1u);
  ::unsetenv("SUBSPACE_PERTURB_THREADS");
  EXPECT_GE(thread_budget(), 1u);
}
