#include <catch_amalgamated.hpp>

#include "labelscape/experiment.hpp"
#include "labelscape/experiment_io.hpp"
#include "support/tempdir.hpp"

using namespace labelscape;
using testing_support::TempDir;

namespace {

ExperimentConfig small_config(Problem problem, std::vector<double> grid, std::size_t walks = 4,
                              std::uint64_t steps = 400'000) {
  ExperimentConfig c;
  c.source = GeneratorSource{problem, 11, 2};
  c.walks = walks;
  c.steps = steps;
  c.v_grid = std::move(grid);
  c.base_seed = 17;
  c.threads = 1;
  return c;
}

ExperimentResult fake_result(std::vector<double> v, std::vector<double> one_minus_p) {
  ExperimentResult r;
  for (std::size_t i = 0; i < v.size(); ++i) {
    r.levels.push_back({v[i], 0, one_minus_p[i], 0.0, 0.0, std::nullopt});
    r.records.push_back({i, v[i], 0, 0, 0.0, 1.0 - one_minus_p[i]});
  }
  return r;
}

}  // namespace

TEST_CASE("alternation encoding examples") {
  CHECK(alternation_encode(std::vector<class_id>{5, 5, 5, 5}) == BitArray{0, 0, 0, 0});
  CHECK(alternation_encode(std::vector<class_id>{0, 1, 2, 2, 0}) == BitArray{0, 1, 0, 0, 1});
  CHECK_THROWS_AS(alternation_encode(std::vector<class_id>{}), parameter_error);
}

TEST_CASE("alternation encoding of a binary sequence matches it up to complement") {
  Rng rng(3);
  std::vector<class_id> labels(1000);
  for (auto& l : labels) l = static_cast<class_id>(rng.bounded(2));
  const auto bits = alternation_encode(labels);
  for (std::size_t i = 0; i < labels.size(); ++i) REQUIRE(bits[i] == (labels[i] ^ labels[0]));
}

TEST_CASE("alternation encoding of iid 8-class labels is far from random") {
  Rng rng(8);
  std::vector<class_id> labels(1'000'001);
  for (auto& l : labels) l = static_cast<class_id>(rng.bounded(8));
  const auto bits = alternation_encode(labels);
  std::size_t flips = 0;
  for (std::size_t i = 1; i < bits.size(); ++i) flips += bits[i] != bits[i - 1];
  CHECK(std::fabs(static_cast<double>(flips) / 1e6 - 7.0 / 8.0) < 0.002);
  CHECK(1.0 - maurer_test(bits).p_value > 0.999999);
}

TEST_CASE("uncorrupted parity is fully structured") {
  const auto r = run_experiment(small_config(Problem::parity, {0.0}, 30, 1'000'000));
  REQUIRE(r.levels.size() == 1);
  CHECK(r.levels[0].mean_one_minus_p >= 1.0 - 1e-6);
  // L = 7 is odd, so consecutive blocks alternate between two patterns: every A_n is 2.
  REQUIRE(r.params.block_length == 7);
  for (const auto& rec : r.records) REQUIRE(rec.f_tu == 1.0);
}

TEST_CASE("single-class landscape gives (1 - p) = 1") {
  const auto flat = gen_parity(11).with_labels(std::vector<class_id>(2048, 0));
  auto c = small_config(Problem::parity, {0.0});
  const auto r = run_experiment(c, flat);
  CHECK(r.levels[0].mean_one_minus_p == 1.0);
}

TEST_CASE("record layout and seeds") {
  const auto c = small_config(Problem::xor_first_two, {0.0, 0.5, 1.0}, 3, 400'000);
  const auto r = run_experiment(c);
  REQUIRE(r.records.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(r.records[i].v_index == i / 3);
    CHECK(r.records[i].walk == i % 3);
    CHECK(r.records[i].seed == walk_seed(17, i / 3, i % 3));
  }
  CHECK(r.params == select_maurer_params(400'001));
  CHECK(r.encoding == Encoding::binary);
  // Each record can be recomputed from its seed alone.
  const auto& rec = r.records[4];
  const auto landscape = corrupt_labels(gen_xor(11), 0.5, corruption_seed(17, 1));
  const auto bits = as_bits(random_walk(landscape, 400'000, rec.seed));
  const auto m = maurer_test(bits, r.params);
  CHECK(m.f_tu == rec.f_tu);
  CHECK(m.p_value == rec.p_value);
  double p_sum = 0.0;
  for (std::size_t w = 0; w < 3; ++w) p_sum += r.records[3 + w].p_value;
  CHECK(r.levels[1].mean_one_minus_p == Catch::Approx(1.0 - p_sum / 3).margin(1e-15));
}

TEST_CASE("results do not depend on thread count") {
  auto c = small_config(Problem::majority, {0.0, 0.7, 1.0}, 5, 400'000);
  const auto one = run_experiment(c);
  c.threads = 8;
  const auto eight = run_experiment(c);
  CHECK(results_csv(one) == results_csv(eight));
}

TEST_CASE("walk policy at full corruption") {
  // Memoryless walks backtrack with probability 1/d; the resulting repeats are
  // visible to the test even when every label is an independent coin flip.
  // Individual corruption draws can be visibly unbalanced, so average over several.
  double memoryless = 0.0, non_backtracking = 0.0;
  for (seed_t base = 0; base < 5; ++base) {
    auto c = small_config(Problem::majority, {1.0}, 10, 1'000'000);
    c.base_seed = base;
    memoryless += run_experiment(c).levels[0].mean_one_minus_p / 5;
    c.walk_policy = WalkPolicy::non_backtracking;
    non_backtracking += run_experiment(c).levels[0].mean_one_minus_p / 5;
  }
  CHECK(memoryless > 0.999);
  CHECK(non_backtracking < 0.8);
}

TEST_CASE("multi-class landscapes use alternation encoding") {
  ExperimentConfig c = small_config(Problem::first_bits, {0.0}, 2, 400'000);
  c.source = GeneratorSource{Problem::first_bits, 11, 4};
  CHECK(run_experiment(c).encoding == Encoding::alternation);
  c.encoding = Encoding::binary;
  CHECK_THROWS_AS(run_experiment(c), not_binary_error);
}

TEST_CASE("configuration errors") {
  auto c = small_config(Problem::parity, {0.0});
  c.steps = 1000;
  CHECK_THROWS_AS(run_experiment(c), insufficient_data_error);
  c = small_config(Problem::parity, {1.5});
  CHECK_THROWS_AS(run_experiment(c), parameter_error);
  c = small_config(Problem::parity, {0.0});
  c.maurer = MaurerParams{8, 2560, 1'000'000};
  CHECK_THROWS_AS(run_experiment(c), insufficient_data_error);
  c.maurer = MaurerParams{6, 640, 10'000};
  CHECK(run_experiment(c).params == MaurerParams{6, 640, 10'000});
}

TEST_CASE("pearson join") {
  const auto r = fake_result({0.0, 0.5, 1.0}, {1.0, 0.8, 0.6});
  const std::vector<GeneralizationEntry> linear{{0.0, 0.1}, {0.5, 0.2}, {1.0, 0.3}};
  const auto joined = join_generalization(r, linear);
  CHECK(*joined.pearson_r == Catch::Approx(-1.0).margin(1e-12));
  CHECK(*joined.levels[1].g_err == 0.2);
  const std::vector<GeneralizationEntry> constant{{0.0, 0.5}, {0.5, 0.5}, {1.0, 0.5}};
  CHECK_THROWS_AS(join_generalization(r, constant), undefined_correlation_error);
  const std::vector<GeneralizationEntry> missing{{0.0, 0.1}, {1.0, 0.3}};
  CHECK_THROWS_AS(join_generalization(r, missing), join_error);
  CHECK_THROWS_WITH(join_generalization(r, missing), Catch::Matchers::ContainsSubstring("v=0.5"));
}

TEST_CASE("per-run pearson uses every walk") {
  auto r = fake_result({0.0, 1.0}, {1.0, 0.5});
  r.records.push_back({0, 0.0, 1, 0, 0.0, 0.2});
  r.records.push_back({1, 1.0, 1, 0, 0.0, 0.3});
  r.pearson_mode = PearsonMode::per_run;
  const std::vector<GeneralizationEntry> g{{0.0, 0.0}, {1.0, 1.0}};
  // pairs (0, 1.0) (1, 0.5) (0, 0.8) (1, 0.7)
  const std::vector<double> xs{0, 1, 0, 1}, ys{1.0, 0.5, 0.8, 0.7};
  CHECK(*join_generalization(r, g).pearson_r == Catch::Approx(pearson_r(xs, ys)).margin(1e-15));
}

TEST_CASE("generalization table parsing") {
  const auto plain = parse_generalization_csv("0,0.1\n0.5,0.2\n");
  REQUIRE(plain.size() == 2);
  CHECK(plain[1].v == 0.5);
  CHECK(plain[1].g_err == 0.2);
  const auto named = parse_generalization_csv("# measured\nv,one_minus_p,g_err\n0,0.9,0.05\n1,0.4,0.5\n");
  REQUIRE(named.size() == 2);
  CHECK(named[0].g_err == 0.05);
  CHECK(named[1].v == 1.0);
  CHECK_THROWS_AS(parse_generalization_csv("v,g_err\n"), load_error);
  CHECK_THROWS_AS(parse_generalization_csv("0,0.1\n0.5,x\n"), load_error);
}

TEST_CASE("config json round trip") {
  const auto j = json::parse(R"({
    "landscape": {"generator": {"problem": "majority", "d": 9}},
    "walks": 7, "steps": 500000, "v_grid": [0, 0.25], "base_seed": 99,
    "maurer": {"L": 6, "Q": 640, "K": 80000}, "variance": "asymptotic",
    "encoding": "binary", "walk_policy": "non-backtracking", "pearson": "per-run", "threads": 2})");
  const auto c = parse_experiment_config(j);
  const auto& g = std::get<GeneratorSource>(c.source);
  CHECK(g.problem == Problem::majority);
  CHECK(g.d == 9);
  CHECK(c.walks == 7);
  CHECK(c.steps == 500'000);
  CHECK(c.v_grid == std::vector<double>{0, 0.25});
  CHECK(c.base_seed == 99);
  CHECK(*c.maurer == MaurerParams{6, 640, 80'000});
  CHECK(c.variance_model == VarianceModel::asymptotic);
  CHECK(c.encoding == Encoding::binary);
  CHECK(c.walk_policy == WalkPolicy::non_backtracking);
  CHECK(c.pearson_mode == PearsonMode::per_run);
  CHECK(to_json(parse_experiment_config(to_json(c))) == to_json(c));

  const auto defaults = parse_experiment_config(json::parse(R"({"landscape": {"generator": {}}})"));
  CHECK(defaults.walks == 30);
  CHECK(defaults.steps == 1'000'000);
  CHECK(defaults.v_grid == default_v_grid());
  CHECK_FALSE(defaults.maurer.has_value());
  CHECK(defaults.walk_policy == WalkPolicy::memoryless);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_experiment_config(json::parse(R"({})")), parameter_error);
  CHECK_THROWS_AS(parse_experiment_config(json::parse(R"({"landscape": {"generator": {}}, "walks": "x"})")),
                  parameter_error);
  CHECK_THROWS_AS(parse_experiment_config(json::parse(R"({"landscape": {"generator": {}}, "encoding": "gray"})")),
                  parameter_error);
  CHECK_THROWS_AS(parse_experiment_config(json::parse(R"({"landscape": {"generator": {}}, "maurer": {"L": 4}})")),
                  unsupported_parameter_error);
  TempDir dir;
  io::atomic_write(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(load_experiment_config(dir / "bad.json"), load_error);
}

TEST_CASE("relative paths resolve against the config directory") {
  TempDir dir;
  io::atomic_write(dir / "c.json", R"({"landscape": {"embeddings": {"path": "emb.csv", "k": 3}}})");
  const auto c = load_experiment_config(dir / "c.json");
  const auto& e = std::get<EmbeddingSource>(c.source);
  CHECK(e.path == dir / "emb.csv");
  CHECK(e.k == 3);
}

TEST_CASE("results csv format") {
  ExperimentResult r;
  r.records.push_back({0, 0.1, 2, 123, 6.25, 0.5});
  CHECK(results_csv(r) == "v,walk,seed,f_tu,p\n0.10000000000000001,2,123,6.25,0.5\n");
}

TEST_CASE("summary json records parameters and provenance") {
  const auto c = small_config(Problem::parity, {0.0}, 2, 400'000);
  const auto s = summary_json(run_experiment(c), c);
  CHECK(s["maurer_params"]["L"] == 6);
  CHECK(s["maurer_params"]["discarded_bits"] == 400'001 - select_maurer_params(400'001).required_bits());
  CHECK(s["levels"].size() == 1);
  CHECK(s["maurer_constants"].get<std::string>().find("SP 800-22") != std::string::npos);
  CHECK_FALSE(s.contains("pearson_r"));
}
