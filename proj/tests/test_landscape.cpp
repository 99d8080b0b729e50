#include <catch_amalgamated.hpp>

#include <bit>

#include "labelscape/landscape.hpp"
#include "labelscape/landscape_io.hpp"
#include "labelscape/synthetic.hpp"
#include "support/oracles.hpp"

using namespace labelscape;

namespace {

Landscape two_node() {
  return LandscapeBuilder(2, 2).label(0, 0).label(1, 1).neighbor(0, 1).neighbor(1, 0).build();
}

Landscape random_landscape(Rng& rng, std::size_t n, int classes) {
  LandscapeBuilder b(n, classes);
  for (node_id i = 0; i < n; ++i) {
    b.label(i, static_cast<class_id>(rng.bounded(classes)));
    std::vector<node_id> others;
    for (node_id j = 0; j < n; ++j)
      if (j != i) others.push_back(j);
    shuffle(others.begin(), others.end(), rng);
    const auto deg = 1 + rng.bounded(std::min<std::size_t>(n - 1, 6));
    for (std::size_t t = 0; t < deg; ++t) b.neighbor(i, others[t]);
  }
  return b.build();
}

}  // namespace

TEST_CASE("single-class landscape yields a constant sequence") {
  const auto seq = random_walk(gen_parity(4).with_labels(std::vector<class_id>(16, 1)), 5, 3);
  CHECK(seq.labels == std::vector<class_id>(6, 1));
}

TEST_CASE("two-node landscape alternates from the fixed start") {
  WalkOptions opts;
  opts.start = 0;
  CHECK(random_walk(two_node(), 4, 99, opts).labels == std::vector<class_id>{0, 1, 0, 1, 0});
}

TEST_CASE("parity walk alternates and matches direct parity of visited nodes") {
  const auto landscape = gen_parity(11);
  std::vector<node_id> trace;
  WalkOptions opts;
  opts.trace = &trace;
  const auto seq = random_walk(landscape, 100, 17, opts);
  REQUIRE(seq.labels.size() == 101);
  REQUIRE(trace.size() == 101);
  for (std::size_t z = 0; z < seq.labels.size(); ++z) {
    CHECK(seq.labels[z] == (std::popcount(trace[z]) % 2 == 0 ? 1 : 0));
    if (z > 0) CHECK(seq.labels[z] != seq.labels[z - 1]);
  }
}

TEST_CASE("walks are deterministic and record their provenance") {
  Rng rng(1);
  const auto landscape = random_landscape(rng, 40, 3);
  const auto a = random_walk(landscape, 1000, 77);
  const auto b = random_walk(landscape, 1000, 77);
  CHECK(a.labels == b.labels);
  CHECK(a.walk_seed == 77);
  CHECK(a.num_classes == 3);
  CHECK(random_walk(landscape, 1000, 78).labels != a.labels);
}

TEST_CASE("every step follows an edge of the neighborhood") {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto landscape = random_landscape(rng, 30, 2);
    std::vector<node_id> trace;
    WalkOptions opts;
    opts.trace = &trace;
    const auto seq = random_walk(landscape, 500, rng(), opts);
    for (std::size_t z = 0; z < trace.size(); ++z) {
      REQUIRE(seq.labels[z] == landscape.label(trace[z]));
      if (z == 0) continue;
      bool adjacent = false;
      for (std::size_t j = 0; j < landscape.degree(trace[z - 1]); ++j)
        adjacent |= landscape.neighbor(trace[z - 1], j) == trace[z];
      REQUIRE(adjacent);
    }
  }
}

TEST_CASE("first step is uniform over the neighborhood") {
  const auto landscape = gen_xor(11);
  std::vector<std::uint64_t> counts(11, 0);
  std::vector<node_id> trace;
  WalkOptions opts;
  opts.start = 5;
  opts.trace = &trace;
  for (seed_t s = 0; s < 22000; ++s) {
    random_walk(landscape, 1, s, opts);
    ++counts[static_cast<std::size_t>(std::countr_zero(trace[1] ^ trace[0]))];
  }
  CHECK(oracle::chi_square_uniform(counts) < oracle::chi_square_critical(10, 0.001));
}

TEST_CASE("start node is uniform over all nodes") {
  const auto landscape = gen_parity(3);
  std::vector<std::uint64_t> counts(8, 0);
  std::vector<node_id> trace;
  WalkOptions opts;
  opts.trace = &trace;
  for (seed_t s = 0; s < 16000; ++s) {
    random_walk(landscape, 1, s, opts);
    ++counts[trace[0]];
  }
  CHECK(oracle::chi_square_uniform(counts) < oracle::chi_square_critical(7, 0.001));
}

TEST_CASE("non-backtracking walks never return immediately") {
  const auto landscape = gen_majority(7);
  std::vector<node_id> trace;
  WalkOptions opts;
  opts.policy = WalkPolicy::non_backtracking;
  opts.trace = &trace;
  random_walk(landscape, 5000, 3, opts);
  for (std::size_t z = 2; z < trace.size(); ++z) REQUIRE(trace[z] != trace[z - 2]);
  // A lone neighbor is still taken.
  opts.start = 0;
  CHECK(random_walk(two_node(), 4, 1, opts).labels == std::vector<class_id>{0, 1, 0, 1, 0});
}

TEST_CASE("as_bits is the identity on binary labels") {
  LabelSequence seq;
  seq.labels = {0, 1, 1, 0};
  CHECK(as_bits(seq) == BitArray{0, 1, 1, 0});
  seq.labels = {0, 0, 0};
  CHECK(as_bits(seq) == BitArray{0, 0, 0});
  seq.labels = {0, 1, 2};
  seq.num_classes = 3;
  CHECK_THROWS_AS(as_bits(seq), not_binary_error);
}

TEST_CASE("landscape invariants are enforced") {
  CHECK_THROWS_AS(LandscapeBuilder(2, 2).label(0, 2).neighbor(0, 1).neighbor(1, 0).build(), structural_error);
  CHECK_THROWS_AS(LandscapeBuilder(2, 2).neighbor(0, 1).build(), structural_error);
  CHECK_THROWS_AS(LandscapeBuilder(2, 2).neighbor(0, 0).neighbor(1, 0).build(), structural_error);
  CHECK_THROWS_AS(LandscapeBuilder(3, 2).neighbor(0, 1).neighbor(0, 1).neighbor(1, 0).neighbor(2, 0).build(),
                  structural_error);
  CHECK_THROWS_AS(LandscapeBuilder(2, 2).neighbor(0, 5).neighbor(1, 0).build(), structural_error);
  CHECK_THROWS_AS(LandscapeBuilder(2, 1).neighbor(0, 1).neighbor(1, 0).build(), parameter_error);
  CHECK_THROWS_AS(random_walk(two_node(), 0, 1), parameter_error);
}

TEST_CASE("serialization round-trips and preserves walks") {
  Rng rng(3);
  for (int rep = 0; rep < 25; ++rep) {
    const auto original = random_landscape(rng, 2 + rng.bounded(40), 2 + static_cast<int>(rng.bounded(5)));
    const auto text = serialize_landscape(original);
    const auto parsed = parse_landscape(text);
    REQUIRE(serialize_landscape(parsed) == text);
    const seed_t s = rng();
    REQUIRE(random_walk(parsed, 200, s).labels == random_walk(original, 200, s).labels);
  }
  // Implicit hypercube neighborhoods serialize to the same walk.
  const auto cube = gen_parity(6);
  CHECK(random_walk(parse_landscape(serialize_landscape(cube)), 300, 9).labels ==
        random_walk(cube, 300, 9).labels);
}

TEST_CASE("malformed landscape files report the row") {
  CHECK_THROWS_AS(parse_landscape(""), load_error);
  CHECK_THROWS_WITH(parse_landscape("nodes,2,classes\n"), Catch::Matchers::ContainsSubstring("row 1"));
  CHECK_THROWS_WITH(parse_landscape("nodes,2,classes,2\n0,0,1\n1,3,0\n"), Catch::Matchers::ContainsSubstring("row 3"));
  CHECK_THROWS_WITH(parse_landscape("nodes,2,classes,2\n0,0,1\n2,0,0\n"),
                    Catch::Matchers::ContainsSubstring("consecutive"));
  CHECK_THROWS_AS(parse_landscape("nodes,3,classes,2\n0,0,1\n1,0,0\n"), load_error);
  CHECK_THROWS_AS(parse_landscape("nodes,2,classes,2\n0,0,\n1,0,0\n"), load_error);
}
