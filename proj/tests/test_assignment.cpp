#include <gtest/gtest.h>

#include <random>
#include <set>

#include "kgprobe/assignment.hpp"
#include "support.hpp"

using namespace kgprobe;

TEST(Assignment, DominantDiagonal) {
    auto a = solve_assignment({{1, 2}, {2, 1}});
    EXPECT_EQ(a.row_to_col, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(a.cost, 2);
}

TEST(Assignment, Singleton) { EXPECT_EQ(solve_assignment({{0}}).cost, 0); }

TEST(Assignment, Empty) { EXPECT_TRUE(solve_assignment(CostMatrix{}).row_to_col.empty()); }

TEST(Assignment, AntiDiagonal) {
    auto a = solve_assignment({{9, 1, 9}, {9, 9, 1}, {1, 9, 9}});
    EXPECT_EQ(a.row_to_col, (std::vector<std::size_t>{1, 2, 0}));
    EXPECT_EQ(a.cost, 3);
}

TEST(Assignment, InfinityAvoided) {
    auto a = solve_assignment({{kInfinity, 5}, {1, kInfinity}});
    EXPECT_EQ(a.row_to_col, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(a.cost, 6);
}

TEST(Assignment, NoFiniteAssignmentThrows) {
    EXPECT_THROW(solve_assignment({{kInfinity, kInfinity}, {1, 2}}), Error);
    EXPECT_THROW(solve_assignment({{std::nan(""), 1}, {1, 1}}), Error);
}

TEST(Assignment, NegativeEntries) {
    auto m = CostMatrix{{-3, 0, 2}, {1, -1, 4}, {0, 2, -5}};
    EXPECT_EQ(solve_assignment(m).cost, kgtest::brute_force_assignment(m));
}

TEST(Assignment, RandomSixBySixMatchesBruteForce) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> val(0, 20);
    for (int trial = 0; trial < 100; ++trial) {
        CostMatrix m(6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 6; ++j) m(i, j) = val(rng);
        auto a = solve_assignment(m);
        EXPECT_EQ(a.cost, kgtest::brute_force_assignment(m));
        std::set<std::size_t> cols(a.row_to_col.begin(), a.row_to_col.end());
        EXPECT_EQ(cols.size(), 6u);
        double sum = 0;
        for (std::size_t i = 0; i < 6; ++i) sum += m(i, a.row_to_col[i]);
        EXPECT_EQ(sum, a.cost);
    }
}

TEST(Assignment, FractionalCosts) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> val(0, 1);
    for (int trial = 0; trial < 50; ++trial) {
        CostMatrix m(5);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) m(i, j) = val(rng);
        EXPECT_NEAR(solve_assignment(m).cost, kgtest::brute_force_assignment(m), 1e-12);
    }
}
