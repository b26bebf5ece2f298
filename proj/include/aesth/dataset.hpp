#ifndef AESTH_DATASET_HPP
#define AESTH_DATASET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aesth/common.hpp"

namespace aesth::tabular {

enum class SchemaTag { generic, aadb, eva, para };

const char* schema_tag_name(SchemaTag tag);
SchemaTag schema_tag_from_name(const std::string& name);

// Row-major feature matrix with named columns and one scalar target per row.
// Immutable once built; all training/evaluation code shares const references.
struct LabeledDataset {
  std::vector<std::string> feature_names;
  std::vector<double> values;  // n*d row-major
  std::vector<double> targets;
  SchemaTag schema_tag = SchemaTag::generic;
  // Free-form metadata (rater counts, adapter warnings); serialized to the
  // sidecar JSON on export.
  std::map<std::string, std::string> metadata;

  std::size_t n() const { return targets.size(); }
  std::size_t d() const { return feature_names.size(); }
  VecView row(std::size_t i) const {
    return VecView(values.data() + i * d(), d());
  }
  double at(std::size_t i, std::size_t j) const { return values[i * d() + j]; }

  void validate() const;  // throws on invariant violations
};

struct SplitSpec {
  enum class Kind { official_counts, fraction, indices };
  Kind kind = Kind::fraction;
  std::size_t train_count = 0, val_count = 0, test_count = 0;
  double train_frac = 0.8;
  std::vector<std::size_t> train_indices;  // kind == indices
  std::uint64_t seed = 0;
};

struct SplitResult {
  LabeledDataset train;
  std::optional<LabeledDataset> val;
  LabeledDataset test;
  std::vector<std::size_t> train_idx, val_idx, test_idx;
};

struct AttributeDistribution {
  std::vector<std::string> feature_names;
  std::vector<std::size_t> negative, null, positive;
};

struct GeneratorSpec {
  enum class Kind { linear, product_pairs };
  Kind kind = Kind::linear;
  std::vector<double> weights;  // linear
  double intercept = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // product_pairs
  double noise_sd = 0.0;
};

LabeledDataset load_table(const std::string& path,
                          SchemaTag tag = SchemaTag::generic);
void write_table(const LabeledDataset& d, const std::string& path);

LabeledDataset adapt_aadb(const LabeledDataset& raw);

// Per-image vote lists: overall on the 0-10 scale, each attribute on the
// 4-level scale. Means become the dataset entries.
struct EvaVotes {
  std::vector<double> overall;
  std::vector<std::vector<double>> attributes;  // one list per attribute
};
LabeledDataset adapt_eva(const std::vector<std::string>& attribute_names,
                         const std::vector<EvaVotes>& images);

LabeledDataset adapt_para(const LabeledDataset& raw);

SplitResult split_dataset(const LabeledDataset& d, const SplitSpec& spec);

LabeledDataset synth_dataset(std::size_t n, std::size_t d,
                             const GeneratorSpec& gen, std::uint64_t seed);

AttributeDistribution attribute_distribution(const LabeledDataset& d);

// Sidecar metadata written next to exported splits.
void write_sidecar(const LabeledDataset& d, const std::string& csv_path,
                   const std::vector<std::size_t>* split_indices = nullptr);

extern const std::vector<std::string> kAadbAttributes;   // 11, Table 1 order
extern const std::vector<std::string> kEvaAttributes;    // 4
extern const std::vector<std::string> kParaAttributes;   // 7

}  // namespace aesth::tabular

#endif
