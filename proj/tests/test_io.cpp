#include <gtest/gtest.h>

#include "cna/io.hpp"
#include "support.hpp"

using namespace cna;
using io::Json;

TEST(Io, StateRoundTripThroughJson) {
  auto rng = test::rng_for(2, 111);
  const auto st = test::random_state(rng, 3);
  const Json j = io::to_json(st);
  EXPECT_EQ(j.at("layout"), "canonical");
  EXPECT_TRUE(j.contains("imag"));
  const auto back = io::state_from_json(Json::parse(j.dump()));
  EXPECT_LE((back.h() - st.h()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Io, StateDocumentsAcceptedForms) {
  const auto bare = io::state_from_json(Json::parse("[[3, 0], [0, 4]]"));
  EXPECT_NEAR(bare.h()(0, 0).real(), 0.6, 1e-15);
  const auto* f = fixtures::find_state("H_2_2_1");
  Json doc{{"real", f->raw}, {"layout", "reflected"}};
  const auto st = io::state_from_json(doc);
  EXPECT_LE((st.h() - f->state().h()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(io::state_from_json(Json{{"real", f->raw}, {"layout", "sideways"}}), InvalidArgument);
  EXPECT_THROW(io::state_from_json(Json::parse("[[1, 0], [0]]")), InvalidArgument);
  EXPECT_THROW(io::state_from_json(Json::parse("{\"imag\": [[1]]}")), InvalidArgument);
}

TEST(Io, RealMatricesOmitImaginaryPart) {
  const Json j = io::matrix_json(ComplexMatrix::Identity(2, 2));
  EXPECT_FALSE(j.contains("imag"));
  EXPECT_EQ(j.at("real").dump(), "[[1.0,0.0],[0.0,1.0]]");
}

TEST(Io, ChainDocumentIsStable) {
  const auto* f = fixtures::find_state("H_3_2_1");
  const auto chain = build_chain(f->scenario, f->state());
  const auto frame = to_schmidt_frame(chain);
  const Json a = io::chain_json(chain, cabello_fraction(chain), &frame);
  const Json b = io::chain_json(chain, cabello_fraction(chain), &frame);
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a.at("schema_version"), io::kSchemaVersion);
  EXPECT_EQ(a.at("bases").size(), 6u);
  EXPECT_EQ(a.at("report").at("edge_probabilities").size(), 6u);
  EXPECT_EQ(a.begin().key(), "schema_version");
}

TEST(Io, GraphDocuments) {
  const Json doc = Json::parse(R"({"vertices": ["a", "b", "c"],
    "edges": [["a", "b"], ["b", "c"], ["c", "a"]],
    "ordered_pairs": [["a", "b"], ["b", "c"], ["c", "a"]]})");
  const auto g = io::graph_from_json(doc);
  EXPECT_TRUE(has_directed_cycle(g));
  const Json out = io::to_json(g);
  EXPECT_EQ(out.at("vertices"), doc.at("vertices"));
  EXPECT_EQ(out.at("ordered_pairs"), doc.at("ordered_pairs"));
  EXPECT_EQ(io::graph_from_json(out).edges(), g.edges());
  EXPECT_THROW(io::graph_from_json(Json::parse(R"({"vertices": ["a"], "edges": [["a", "z"]]})")),
               InvalidArgument);
  EXPECT_THROW(io::graph_from_json(Json::parse(R"({"vertices": ["a", "b"], "ordered_pairs": [["a", "b"]]})")),
               InvalidArgument);
  EXPECT_THROW(io::graph_from_json(Json::parse(R"({"edges": []})")), InvalidArgument);
}

TEST(Io, OptimizationDocumentMetaIsOptional) {
  OptimizationResult r;
  r.scenario = {2, 2, 1};
  r.best_state = StateMatrix::diagonal({0.8, 0.6});
  r.per_restart_values = {0.1, std::numeric_limits<double>::quiet_NaN()};
  r.iterations_used = {10, 20};
  r.failed_restarts = 1;
  r.wall_time = 1.5;
  OptimizerConfig cfg;
  const Json with = io::optimization_json(r, cfg, "cabello", true);
  const Json without = io::optimization_json(r, cfg, "cabello", false);
  EXPECT_TRUE(with.contains("meta"));
  EXPECT_FALSE(without.contains("meta"));
  EXPECT_TRUE(without.at("per_restart_values").at(1).is_null());
}
