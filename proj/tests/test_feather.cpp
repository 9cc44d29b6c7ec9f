#include <gtest/gtest.h>

#include <random>

#include "kgprobe/feather.hpp"
#include "support.hpp"

using namespace kgprobe;

namespace {

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST(Feather, DefaultDimension) {
    EXPECT_EQ(EmbeddingConfig{}.dimension(), 100u);
    EXPECT_EQ(embed_graph(LabeledGraph{}).vector.size(), 100u);
    EmbeddingConfig two;
    two.features = {NodeFeature::log_degree, NodeFeature::clustering};
    two.eval_points = 7;
    two.order = 3;
    EXPECT_EQ(embed_graph(LabeledGraph{{"a"}, {}}, two).vector.size(), 2u * 2 * 7 * 3);
}

TEST(Feather, EmptyGraphIsZero) {
    for (double v : embed_graph(LabeledGraph{}).vector) EXPECT_EQ(v, 0.0);
}

TEST(Feather, SingleIsolatedNode) {
    auto e = embed_graph(LabeledGraph{{"a"}, {}}).vector;
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(e[i], 1.0) << i;
    for (std::size_t i = 50; i < 100; ++i) EXPECT_EQ(e[i], 0.0) << i;
}

TEST(Feather, TwoNodeEdgeClosedForm) {
    // Both nodes have degree 1, so x = ln 2 everywhere and W is stochastic:
    // every entry is cos/sin(theta_j ln 2).
    auto e = embed_graph(LabeledGraph{{"a", "b"}, {{0, 1, "r"}}}).vector;
    for (std::size_t s = 0; s < 2; ++s) {
        for (std::size_t j = 0; j < 25; ++j) {
            double theta = static_cast<double>(j + 1) * 2.5 / 25.0;
            EXPECT_NEAR(e[s * 25 + j], std::cos(theta * std::log(2.0)), 1e-12);
            EXPECT_NEAR(e[50 + s * 25 + j], std::sin(theta * std::log(2.0)), 1e-12);
        }
    }
}

TEST(Feather, MatchesDenseOracle) {
    std::mt19937 rng(41);
    for (int i = 0; i < 40; ++i) {
        auto g = kgtest::random_simple(rng, 12, 0.2);
        EXPECT_LT(linf(embed_graph(g).vector, kgtest::dense_embedding(g)), 1e-12);
    }
    LabeledGraph star{{"c", "l1", "l2", "l3"}, {{0, 1, "r"}, {0, 2, "r"}, {3, 0, "r"}}};
    EXPECT_LT(linf(embed_graph(star).vector, kgtest::dense_embedding(star)), 1e-12);
    EmbeddingConfig cfg;
    cfg.theta_max = 4;
    cfg.eval_points = 10;
    cfg.order = 3;
    EXPECT_LT(linf(embed_graph(star, cfg).vector, kgtest::dense_embedding(star, 4, 10, 3)), 1e-12);
}

TEST(Feather, DirectionAndParallelEdgesIgnored) {
    LabeledGraph a{{"p", "q", "r"}, {{0, 1, "x"}, {1, 2, "x"}}};
    LabeledGraph b{{"p", "q", "r"}, {{1, 0, "y"}, {0, 1, "z"}, {2, 1, "x"}, {2, 2, "loop"}}};
    EXPECT_EQ(embed_graph(a).vector, embed_graph(b).vector);
}

TEST(Feather, PermutationInvariance) {
    std::mt19937 rng(43);
    for (int i = 0; i < 30; ++i) {
        auto g = kgtest::random_simple(rng, 20, 0.15);
        std::vector<std::size_t> p(g.size());
        std::iota(p.begin(), p.end(), std::size_t{0});
        std::shuffle(p.begin(), p.end(), rng);
        EXPECT_LT(linf(embed_graph(g).vector, embed_graph(kgtest::permute(g, p)).vector), 1e-9);
    }
}

TEST(Feather, ClusteringFeature) {
    EmbeddingConfig cfg;
    cfg.features = {NodeFeature::clustering};
    LabeledGraph tri{{"a", "b", "c"}, {{0, 1, "r"}, {1, 2, "r"}, {2, 0, "r"}}};
    auto e = embed_graph(tri, cfg).vector;
    for (std::size_t j = 0; j < 25; ++j) {
        double theta = static_cast<double>(j + 1) * 0.1;
        EXPECT_NEAR(e[j], std::cos(theta), 1e-12);
        EXPECT_NEAR(e[50 + j], std::sin(theta), 1e-12);
    }
}

TEST(Feather, Deterministic) {
    std::mt19937 rng(47);
    auto g = kgtest::random_simple(rng, 25, 0.2);
    EXPECT_EQ(embed_graph(g).vector, embed_graph(g).vector);
}

TEST(Feather, InvalidConfig) {
    EmbeddingConfig c;
    c.theta_max = 0;
    EXPECT_THROW(c.validate(), Error);
    c = {};
    c.eval_points = 0;
    EXPECT_THROW(embed_graph(LabeledGraph{}, c), Error);
    c = {};
    c.features.clear();
    EXPECT_THROW(c.validate(), Error);
}

TEST(Euclidean, Examples) {
    GraphEmbedding zero{std::vector<double>(100, 0.0), EmbeddingConfig{}.fingerprint()};
    GraphEmbedding unit = zero;
    unit.vector[17] = 1.0;
    EXPECT_EQ(euclidean(zero, zero), 0);
    EXPECT_EQ(euclidean(zero, unit), 1);
    GraphEmbedding a{{1, 2, 3}, "f"}, b{{4, 6, 3}, "f"};
    EXPECT_EQ(euclidean(a, b), 5);
    EXPECT_EQ(euclidean(b, a), 5);
}

TEST(Euclidean, FingerprintMismatch) {
    EmbeddingConfig other;
    other.theta_max = 3;
    EXPECT_NE(other.fingerprint(), EmbeddingConfig{}.fingerprint());
    auto a = embed_graph(LabeledGraph{{"a"}, {}});
    auto b = embed_graph(LabeledGraph{{"a"}, {}}, other);
    EXPECT_THROW(euclidean(a, b), Error);
}

TEST(Euclidean, AxiomsOnRandomGraphs) {
    std::mt19937 rng(53);
    std::vector<GraphEmbedding> es;
    for (int i = 0; i < 12; ++i) es.push_back(embed_graph(kgtest::random_simple(rng, 10, 0.3)));
    for (const auto& a : es) {
        EXPECT_EQ(euclidean(a, a), 0);
        for (const auto& b : es) {
            EXPECT_GE(euclidean(a, b), 0);
            EXPECT_EQ(euclidean(a, b), euclidean(b, a));
            for (const auto& c : es) EXPECT_LE(euclidean(a, c), euclidean(a, b) + euclidean(b, c) + 1e-12);
        }
    }
}

TEST(Feather, JsonRecord) {
    auto j = to_json("g1", embed_graph(LabeledGraph{{"a"}, {}}));
    EXPECT_EQ(j["graph_id"], "g1");
    EXPECT_EQ(j["vector"].size(), 100u);
    EXPECT_EQ(j["config_fingerprint"], EmbeddingConfig{}.fingerprint());
}
