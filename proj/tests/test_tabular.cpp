#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "aesth/dataset.hpp"

using namespace aesth;
using namespace aesth::tabular;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
  std::string path = "tmp_" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_table parses a single-row CSV") {
  auto path = write_tmp("single.csv", "a,b,overall\n0.1,0.2,0.5\n");
  auto d = load_table(path);
  CHECK(d.n() == 1);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.at(0, 0) == 0.1);
  CHECK(d.at(0, 1) == 0.2);
  CHECK(d.targets[0] == 0.5);
  std::remove(path.c_str());
}

TEST_CASE("load_table accepts a PARA-shaped row verbatim") {
  auto path = write_tmp(
      "para_row.csv",
      "quality,composition,colour,depth_of_field,light,content,"
      "object_emphasis,overall\n1.21,1.40,1.40,1.48,1.24,1.24,0.88,1.18\n");
  auto d = load_table(path);
  CHECK(d.at(0, 0) == 1.21);
  CHECK(d.at(0, 3) == 1.48);
  CHECK(d.at(0, 6) == 0.88);
  CHECK(d.targets[0] == 1.18);
  std::remove(path.c_str());
}

TEST_CASE("load_table errors") {
  auto no_target = write_tmp("no_target.csv", "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(load_table(no_target), doctest::Contains("overall"),
                       Error);
  auto bad_cell = write_tmp("bad_cell.csv", "a,overall\nfoo,1\n");
  CHECK_THROWS_AS(load_table(bad_cell), Error);
  auto empty = write_tmp("empty.csv", "a,overall\n");
  CHECK_THROWS_AS(load_table(empty), Error);
  std::remove(no_target.c_str());
  std::remove(bad_cell.c_str());
  std::remove(empty.c_str());
}

TEST_CASE("csv round trip is bit exact") {
  GeneratorSpec gen;
  gen.kind = GeneratorSpec::Kind::linear;
  gen.weights = {1.5, -0.25, 3.0};
  gen.intercept = 0.125;
  gen.noise_sd = 0.3;
  auto d = synth_dataset(50, 3, gen, 99);
  write_table(d, "tmp_roundtrip.csv");
  auto back = load_table("tmp_roundtrip.csv");
  REQUIRE(back.n() == d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    CHECK(back.targets[i] == d.targets[i]);
    for (std::size_t j = 0; j < d.d(); ++j)
      CHECK(back.at(i, j) == d.at(i, j));
  }
  std::remove("tmp_roundtrip.csv");
}

namespace {

LabeledDataset make_aadb_row(double target, double repetition,
                             double colour_harmony) {
  LabeledDataset raw;
  raw.feature_names = kAadbAttributes;
  raw.values.assign(11, 0.0);
  raw.values[1] = colour_harmony;  // colour_harmony is second in Table 1 order
  raw.values[7] = repetition;
  raw.targets = {target};
  return raw;
}

}  // namespace

TEST_CASE("adapt_aadb range validation") {
  // all-zero attributes with a 1.0 target: the dataset really contains them
  auto ok = adapt_aadb(make_aadb_row(1.0, 0.0, 0.0));
  CHECK(ok.schema_tag == SchemaTag::aadb);

  CHECK_THROWS_AS(adapt_aadb(make_aadb_row(0.5, -0.2, 0.0)), Error);

  // closed-interval boundary
  auto boundary = adapt_aadb(make_aadb_row(0.0, 0.0, 1.0));
  CHECK(boundary.at(0, 1) == 1.0);

  auto wrong = make_aadb_row(0.5, 0.0, 0.0);
  wrong.feature_names[0] = "unexpected";
  CHECK_THROWS_AS(adapt_aadb(wrong), Error);
}

TEST_CASE("adapt_eva averages votes") {
  EvaVotes img;
  img.overall = {5, 7};
  img.attributes = {{1, 2, 3, 4}, {2, 2}, {3}, {4, 4}};
  auto d = adapt_eva(kEvaAttributes, {img});
  CHECK(d.targets[0] == doctest::Approx(6.0));
  CHECK(d.at(0, 0) == doctest::Approx(2.5));  // arithmetic mean oracle
  CHECK(d.at(0, 1) == doctest::Approx(2.0));
  CHECK(d.schema_tag == SchemaTag::eva);
  CHECK(d.metadata.count("warning") == 1);  // fewer than 30 votes

  EvaVotes constant;
  constant.overall.assign(30, 10.0);
  constant.attributes = {{1}, {1}, {1}, {1}};
  auto d2 = adapt_eva(kEvaAttributes, {constant});
  CHECK(d2.targets[0] == 10.0);
  CHECK(d2.metadata.count("warning") == 0);

  EvaVotes bad;
  bad.overall = {11};
  bad.attributes = {{1}, {1}, {1}, {1}};
  CHECK_THROWS_AS(adapt_eva(kEvaAttributes, {bad}), Error);
  EvaVotes none;
  none.attributes = {{1}, {1}, {1}, {1}};
  CHECK_THROWS_AS(adapt_eva(kEvaAttributes, {none}), Error);
}

TEST_CASE("adapt_eva means stay inside the vote range") {
  std::vector<EvaVotes> imgs;
  for (int i = 0; i < 20; ++i) {
    EvaVotes v;
    for (int r = 0; r <= i % 7; ++r) v.overall.push_back(double((i + r) % 11));
    v.attributes.assign(4, {1.0, double(1 + i % 4)});
    imgs.push_back(v);
  }
  auto d = adapt_eva(kEvaAttributes, imgs);
  for (std::size_t i = 0; i < d.n(); ++i) {
    auto& votes = imgs[i].overall;
    double lo = *std::min_element(votes.begin(), votes.end());
    double hi = *std::max_element(votes.begin(), votes.end());
    CHECK(d.targets[i] >= lo);
    CHECK(d.targets[i] <= hi);
  }
}

TEST_CASE("adapt_para projects to the seven attributes") {
  LabeledDataset raw;
  raw.feature_names = {"quality",  "composition",     "colour",
                       "depth_of_field", "light",     "content",
                       "object_emphasis", "emotion"};
  raw.values = {1.21, 1.40, 1.40, 1.48, 1.24, 1.24, 0.88, 3.0,
                4.50, 4.28, 4.36, 4.16, 4.32, 3.96, 0.16, 2.0};
  raw.targets = {1.18, 4.42};
  auto d = adapt_para(raw);
  CHECK(d.d() == 7);
  CHECK(d.schema_tag == SchemaTag::para);
  // the two published example rows survive the projection untouched
  CHECK(d.at(0, 0) == 1.21);
  CHECK(d.at(0, 6) == 0.88);
  CHECK(d.targets[0] == 1.18);
  CHECK(d.at(1, 0) == 4.50);
  CHECK(d.at(1, 6) == 0.16);
  CHECK(d.targets[1] == 4.42);
  for (auto& n : d.feature_names) CHECK(n != "emotion");

  raw.targets[0] = 0.5;  // below the 1-5 aesthetics scale
  CHECK_THROWS_AS(adapt_para(raw), Error);
}

TEST_CASE("split_dataset official counts") {
  GeneratorSpec gen;
  gen.weights = {1.0};
  auto d = synth_dataset(10000, 1, gen, 7);
  SplitSpec spec;
  spec.kind = SplitSpec::Kind::official_counts;
  spec.train_count = 8500;
  spec.val_count = 500;
  spec.test_count = 1000;
  spec.seed = 3;
  auto s = split_dataset(d, spec);
  CHECK(s.train.n() == 8500);
  REQUIRE(s.val.has_value());
  CHECK(s.val->n() == 500);
  CHECK(s.test.n() == 1000);

  // EVA-style counts
  auto d2 = synth_dataset(4070, 1, gen, 7);
  spec.train_count = 3500;
  spec.val_count = 0;
  spec.test_count = 570;
  auto s2 = split_dataset(d2, spec);
  CHECK(s2.train.n() == 3500);
  CHECK(!s2.val.has_value());
  CHECK(s2.test.n() == 570);

  spec.train_count = 5000;
  CHECK_THROWS_AS(split_dataset(d2, spec), Error);
}

TEST_CASE("split_dataset is a disjoint cover and seed-deterministic") {
  GeneratorSpec gen;
  gen.weights = {1.0, 1.0};
  auto d = synth_dataset(101, 2, gen, 11);
  SplitSpec spec;
  spec.kind = SplitSpec::Kind::fraction;
  spec.train_frac = 0.7;
  spec.seed = 5;
  auto s = split_dataset(d, spec);
  std::set<std::size_t> seen;
  for (auto i : s.train_idx) CHECK(seen.insert(i).second);
  for (auto i : s.test_idx) CHECK(seen.insert(i).second);
  CHECK(seen.size() == d.n());

  auto s2 = split_dataset(d, spec);
  CHECK(s2.train_idx == s.train_idx);
  CHECK(s2.test_idx == s.test_idx);

  spec.train_frac = 1.0;
  auto whole = split_dataset(d, spec);
  CHECK(whole.train.n() == d.n());
  CHECK(whole.test.n() == 0);
}

TEST_CASE("synth_dataset generators") {
  GeneratorSpec lin;
  lin.kind = GeneratorSpec::Kind::linear;
  lin.weights = {2.0, 3.0};
  lin.intercept = 1.0;
  auto d = synth_dataset(20, 2, lin, 42);
  for (std::size_t i = 0; i < d.n(); ++i)
    CHECK(d.targets[i] ==
          doctest::Approx(1.0 + 2.0 * d.at(i, 0) + 3.0 * d.at(i, 1))
              .epsilon(1e-12));

  GeneratorSpec prod;
  prod.kind = GeneratorSpec::Kind::product_pairs;
  prod.pairs = {{0, 1}};
  auto p = synth_dataset(20, 2, prod, 42);
  for (std::size_t i = 0; i < p.n(); ++i)
    CHECK(p.targets[i] == doctest::Approx(p.at(i, 0) * p.at(i, 1)));

  auto again = synth_dataset(20, 2, prod, 42);
  CHECK(again.values == p.values);
  CHECK(again.targets == p.targets);

  GeneratorSpec bad;
  bad.kind = GeneratorSpec::Kind::product_pairs;
  bad.pairs = {{0, 5}};
  CHECK_THROWS_AS(synth_dataset(10, 2, bad, 1), Error);
}

TEST_CASE("attribute_distribution sign counts") {
  LabeledDataset d;
  d.feature_names = {"a", "b", "c"};
  d.values = {-1, 0, 0.3, 0, 0, -0.3, 0, 0, 0.0001, 1, 0, 0.5};
  d.targets = {0, 0, 0, 0};
  auto dist = attribute_distribution(d);
  CHECK(dist.negative[0] == 1);
  CHECK(dist.null[0] == 2);
  CHECK(dist.positive[0] == 1);
  CHECK(dist.null[1] == 4);  // all-zero column
  // sign-count oracle for [0.3, -0.3, 0.0001, 0.5]
  CHECK(dist.negative[2] == 1);
  CHECK(dist.null[2] == 0);
  CHECK(dist.positive[2] == 3);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(dist.negative[j] + dist.null[j] + dist.positive[j] == d.n());
}
