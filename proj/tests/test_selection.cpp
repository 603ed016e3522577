#include <szo/objective.hpp>
#include <szo/selection.hpp>

#include <gtest/gtest.h>

#include <algorithm>

namespace szo {
namespace {

TEST(Threshold, Examples) {
    const Vector g{{0.5, -0.05, 0.2}};
    EXPECT_EQ(threshold_support(g, 0.1), (std::vector<Index>{0, 2}));
    EXPECT_TRUE(threshold_support(g, 0.6).empty());
    EXPECT_EQ(threshold_support(Vector{{0.1}}, 0.1), (std::vector<Index>{0}));
    EXPECT_EQ(threshold_support(Vector{{-0.1}}, 0.1), (std::vector<Index>{0}));
    EXPECT_THROW(threshold_support(g, 0.0), InvalidArgument);
}

TEST(SetUnion, SortedNoDuplicates) {
    EXPECT_EQ(set_union({1, 4, 9}, {0, 4, 10}), (std::vector<Index>{0, 1, 4, 9, 10}));
}

ObjectiveSpec identity_spec(Index d, Index s) {
    ObjectiveSpec spec;
    spec.family = Family::IdentityQuadratic;
    spec.d = d;
    spec.s = s;
    return spec;
}

OptimizerParams base(std::int64_t T, Index s) {
    OptimizerParams op;
    op.T = T;
    op.B = 3.0;
    op.s = s;
    op.H = 10.0;
    op.sigma = 0.1;
    return op;
}

TEST(Selection, PhaseBudget) {
    const SelectionParams p = resolve_selection_params(base(1000, 5), 50);
    EXPECT_EQ(p.T_prime, 100);
    EXPECT_DOUBLE_EQ(p.eta, 2.0 * p.lambda);
}

TEST(Selection, NeverExceedsBudget) {
    const Objective obj = make_objective(identity_spec(50, 5), 2);
    for (std::int64_t T : {1000, 3333, 12000}) {
        for (double c : {0.01, 1.0, 100.0}) {
            OptimizerParams op = base(T, 5);
            op.c_lambda = c;
            NoisyOracle oracle(obj, 50, 0.1, 3, T);
            Rng rng(4);
            const SelectionResult res = successive_select(oracle, op, rng);
            EXPECT_LE(oracle.queries_used(), T);
            EXPECT_LE(res.x_final.lpNorm<1>(), op.B + 1e-12);
            EXPECT_LE(res.rounds, 5);
        }
    }
}

TEST(Selection, NoiselessRecoveryInOneRound) {
    const Objective obj = make_objective(identity_spec(50, 5), 6);
    OptimizerParams op = base(4000, 5);
    op.sigma = 0.0;
    op.delta = 0.01;
    op.lambda = 0.1;  // threshold 0.2, support gradient at 0 is 1
    op.flaxman_c_eta = 0.01;
    NoisyOracle oracle(obj, 50, 0.0, 3);
    Rng rng(4);
    const SelectionResult res = successive_select(oracle, op, rng);
    ASSERT_EQ(res.support_history.size(), 1u);
    EXPECT_EQ(res.support_history.front(), obj.support());
    EXPECT_EQ(res.S_hat, obj.support());
    EXPECT_EQ(res.rounds, 1);
    EXPECT_EQ(res.queries, 4000);
    EXPECT_LT(obj(res.x_final), 0.0);  // made progress from f(0) = 0
}

TEST(Selection, SupportGrowsMonotonically) {
    const Objective obj = make_objective(identity_spec(60, 6), 8);
    OptimizerParams op = base(20000, 6);
    op.c_lambda = 0.3;
    NoisyOracle oracle(obj, 60, 0.1, 3);
    Rng rng(4);
    const SelectionResult res = successive_select(oracle, op, rng);
    for (std::size_t k = 1; k < res.support_history.size(); ++k) {
        const auto& prev = res.support_history[k - 1];
        const auto& cur = res.support_history[k];
        EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    }
}

TEST(Selection, EmptyFirstRoundReturnsStart) {
    const Objective obj = make_objective(identity_spec(30, 3), 1);
    OptimizerParams op = base(3000, 3);
    op.lambda = 100.0;
    NoisyOracle oracle(obj, 30, 0.1, 3);
    Rng rng(4);
    const SelectionResult res = successive_select(oracle, op, rng);
    EXPECT_TRUE(res.S_hat.empty());
    EXPECT_TRUE(res.x_final.isZero(0.0));
    EXPECT_EQ(res.rounds, 1);
    EXPECT_EQ(res.queries, 3000 / 6);
}

TEST(Selection, DefaultRadiusNeedsNoiseAndCurvature) {
    OptimizerParams op = base(1000, 5);
    op.sigma = 0.0;
    EXPECT_THROW(resolve_selection_params(op, 50), InvalidArgument);
    op.delta = 0.1;
    EXPECT_NO_THROW(resolve_selection_params(op, 50));
    EXPECT_THROW(resolve_selection_params(base(10, 5), 50), InvalidArgument);
}

}  // namespace
}  // namespace szo
