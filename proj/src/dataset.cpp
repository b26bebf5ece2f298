#include "aesth/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "aesth/rng.hpp"

namespace aesth {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "Ok";
    case ErrorCode::missing_target_column: return "MissingTargetColumn";
    case ErrorCode::non_numeric_cell: return "NonNumericCell";
    case ErrorCode::empty_table: return "EmptyTable";
    case ErrorCode::range_violation: return "RangeViolation";
    case ErrorCode::wrong_column_set: return "WrongColumnSet";
    case ErrorCode::empty_vote_list: return "EmptyVoteList";
    case ErrorCode::out_of_scale_vote: return "OutOfScaleVote";
    case ErrorCode::counts_exceed_n: return "CountsExceedN";
    case ErrorCode::bad_generator_spec: return "BadGeneratorSpec";
    case ErrorCode::empty_train_set: return "EmptyTrainSet";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::zero_variance: return "ZeroVariance";
    case ErrorCode::non_convergence: return "NonConvergence";
    case ErrorCode::not_linear_kernel: return "NotLinearKernel";
    case ErrorCode::empty_batch: return "EmptyBatch";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::k_exceeds_n: return "KExceedsN";
    case ErrorCode::too_many_features: return "TooManyFeatures";
    case ErrorCode::singular_system: return "SingularSystem";
    case ErrorCode::missing_covers: return "MissingCovers";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::index_out_of_range: return "IndexOutOfRange";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::zero_variance_target: return "ZeroVarianceTarget";
    case ErrorCode::constant_input: return "ConstantInput";
    case ErrorCode::rank_deficient: return "RankDeficient";
    case ErrorCode::missing_input: return "MissingInput";
    case ErrorCode::unknown_kind: return "UnknownKind";
    case ErrorCode::incompatible_explain_method:
      return "IncompatibleExplainMethod";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::bad_config: return "BadConfig";
  }
  return "Unknown";
}

}  // namespace aesth

namespace aesth::tabular {

const std::vector<std::string> kAadbAttributes = {
    "balancing_elements", "colour_harmony", "content",    "depth_of_field",
    "light",              "motion_blur",    "object_emphasis",
    "repetition",         "rule_of_thirds", "symmetry",   "vivid_colour"};

const std::vector<std::string> kEvaAttributes = {
    "light_and_colour", "composition_and_depth", "quality", "semantics"};

const std::vector<std::string> kParaAttributes = {
    "quality", "composition", "colour", "depth_of_field",
    "light",   "content",     "object_emphasis"};

const char* schema_tag_name(SchemaTag tag) {
  switch (tag) {
    case SchemaTag::generic: return "generic";
    case SchemaTag::aadb: return "aadb";
    case SchemaTag::eva: return "eva";
    case SchemaTag::para: return "para";
  }
  return "generic";
}

SchemaTag schema_tag_from_name(const std::string& name) {
  if (name == "aadb") return SchemaTag::aadb;
  if (name == "eva") return SchemaTag::eva;
  if (name == "para") return SchemaTag::para;
  if (name == "generic" || name.empty()) return SchemaTag::generic;
  throw Error(ErrorCode::bad_config, "unknown schema tag: " + name);
}

void LabeledDataset::validate() const {
  if (n() == 0 || d() == 0)
    throw Error(ErrorCode::empty_table, "dataset must have n >= 1, d >= 1");
  if (values.size() != n() * d())
    throw Error(ErrorCode::shape_mismatch, "values size mismatch");
  std::set<std::string> names(feature_names.begin(), feature_names.end());
  if (names.size() != feature_names.size())
    throw Error(ErrorCode::wrong_column_set, "duplicate feature names");
  for (double v : values)
    if (!std::isfinite(v))
      throw Error(ErrorCode::non_numeric_cell, "non-finite feature value");
  for (double v : targets)
    if (!std::isfinite(v))
      throw Error(ErrorCode::non_numeric_cell, "non-finite target value");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const std::string t = trim(cell);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size())
    throw Error(ErrorCode::non_numeric_cell,
                "non-numeric cell at row " + std::to_string(row) + ", col " +
                    std::to_string(col) + ": '" + cell + "'");
  return v;
}

// Shortest decimal digits that round-trip a double, printf %.17g fallback.
std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

LabeledDataset load_table(const std::string& path, SchemaTag tag) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::empty_table, "empty file: " + path);
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  std::size_t target_col = header.size();
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == "overall") target_col = j;
  if (target_col == header.size())
    throw Error(ErrorCode::missing_target_column,
                "no 'overall' column in " + path);

  LabeledDataset d;
  d.schema_tag = tag;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (j != target_col) d.feature_names.push_back(header[j]);
  if (d.feature_names.empty())
    throw Error(ErrorCode::empty_table, "no feature columns in " + path);

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::non_numeric_cell,
                  "row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = parse_cell(cells[j], row, j);
      if (j == target_col)
        d.targets.push_back(v);
      else
        d.values.push_back(v);
    }
    ++row;
  }
  if (row == 0) throw Error(ErrorCode::empty_table, "no data rows in " + path);
  d.validate();
  return d;
}

void write_table(const LabeledDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  for (const auto& name : d.feature_names) out << name << ',';
  out << "overall\n";
  for (std::size_t i = 0; i < d.n(); ++i) {
    for (std::size_t j = 0; j < d.d(); ++j)
      out << format_double(d.at(i, j)) << ',';
    out << format_double(d.targets[i]) << '\n';
  }
}

namespace {

void check_range(const std::string& feat, double v, double lo, double hi) {
  if (v < lo || v > hi)
    throw Error(ErrorCode::range_violation,
                "RangeViolation: " + feat + " = " + std::to_string(v) +
                    " outside [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
}

// Reorders raw columns to `want`; throws WrongColumnSet on missing names.
// Extra columns are dropped only when allow_extra is set.
LabeledDataset project_columns(const LabeledDataset& raw,
                               const std::vector<std::string>& want,
                               bool allow_extra) {
  std::vector<std::size_t> index(want.size());
  for (std::size_t k = 0; k < want.size(); ++k) {
    auto it = std::find(raw.feature_names.begin(), raw.feature_names.end(),
                        want[k]);
    if (it == raw.feature_names.end())
      throw Error(ErrorCode::wrong_column_set,
                  "missing expected column: " + want[k]);
    index[k] = std::size_t(it - raw.feature_names.begin());
  }
  if (!allow_extra && raw.d() != want.size())
    throw Error(ErrorCode::wrong_column_set,
                "expected exactly " + std::to_string(want.size()) +
                    " feature columns, got " + std::to_string(raw.d()));
  LabeledDataset out;
  out.feature_names = want;
  out.targets = raw.targets;
  out.metadata = raw.metadata;
  out.values.reserve(raw.n() * want.size());
  for (std::size_t i = 0; i < raw.n(); ++i)
    for (std::size_t k : index) out.values.push_back(raw.at(i, k));
  return out;
}

}  // namespace

LabeledDataset adapt_aadb(const LabeledDataset& raw) {
  LabeledDataset d = project_columns(raw, kAadbAttributes, false);
  d.schema_tag = SchemaTag::aadb;
  for (std::size_t i = 0; i < d.n(); ++i) {
    check_range("overall", d.targets[i], 0.0, 1.0);
    for (std::size_t j = 0; j < d.d(); ++j) {
      const std::string& name = d.feature_names[j];
      // Repetition and symmetry have no negative ratings; all other
      // attributes run over [-1, 1].
      if (name == "repetition" || name == "symmetry")
        check_range(name, d.at(i, j), 0.0, 1.0);
      else
        check_range(name, d.at(i, j), -1.0, 1.0);
    }
  }
  d.validate();
  return d;
}

LabeledDataset adapt_eva(const std::vector<std::string>& attribute_names,
                         const std::vector<EvaVotes>& images) {
  if (images.empty())
    throw Error(ErrorCode::empty_table, "no images given to adapt_eva");
  LabeledDataset d;
  d.feature_names = attribute_names;
  d.schema_tag = SchemaTag::eva;
  std::size_t under_voted = 0;
  std::size_t min_raters = SIZE_MAX;
  for (const auto& img : images) {
    if (img.overall.empty())
      throw Error(ErrorCode::empty_vote_list, "image with no overall votes");
    if (img.attributes.size() != attribute_names.size())
      throw Error(ErrorCode::shape_mismatch,
                  "attribute vote lists do not match attribute names");
    for (double v : img.overall)
      if (v < 0.0 || v > 10.0)
        throw Error(ErrorCode::out_of_scale_vote,
                    "overall vote outside the 0-10 scale");
    double sum = std::accumulate(img.overall.begin(), img.overall.end(), 0.0);
    d.targets.push_back(sum / double(img.overall.size()));
    if (img.overall.size() < 30) ++under_voted;
    min_raters = std::min(min_raters, img.overall.size());
    for (const auto& votes : img.attributes) {
      if (votes.empty())
        throw Error(ErrorCode::empty_vote_list, "image with no attribute votes");
      for (double v : votes)
        if (v < 1.0 || v > 4.0)
          throw Error(ErrorCode::out_of_scale_vote,
                      "attribute vote outside the 4-level scale");
      double s = std::accumulate(votes.begin(), votes.end(), 0.0);
      d.values.push_back(s / double(votes.size()));
    }
  }
  d.metadata["min_raters"] = std::to_string(min_raters);
  if (under_voted > 0)
    d.metadata["warning"] = std::to_string(under_voted) +
                            " images have fewer than 30 overall votes";
  d.validate();
  return d;
}

LabeledDataset adapt_para(const LabeledDataset& raw) {
  LabeledDataset d = project_columns(raw, kParaAttributes, true);
  d.schema_tag = SchemaTag::para;
  for (std::size_t i = 0; i < d.n(); ++i) {
    check_range("overall", d.targets[i], 1.0, 5.0);
    for (std::size_t j = 0; j < d.d(); ++j) {
      const std::string& name = d.feature_names[j];
      if (name == "object_emphasis")
        check_range(name, d.at(i, j), 0.0, 1.0);
      else
        check_range(name, d.at(i, j), 1.0, 5.0);
    }
  }
  d.validate();
  return d;
}

namespace {

LabeledDataset take_rows(const LabeledDataset& d,
                         const std::vector<std::size_t>& idx) {
  LabeledDataset out;
  out.feature_names = d.feature_names;
  out.schema_tag = d.schema_tag;
  out.metadata = d.metadata;
  out.values.reserve(idx.size() * d.d());
  out.targets.reserve(idx.size());
  for (std::size_t i : idx) {
    auto r = d.row(i);
    out.values.insert(out.values.end(), r.begin(), r.end());
    out.targets.push_back(d.targets[i]);
  }
  return out;
}

}  // namespace

SplitResult split_dataset(const LabeledDataset& d, const SplitSpec& spec) {
  const std::size_t n = d.n();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  SplitResult out;
  if (spec.kind == SplitSpec::Kind::indices) {
    std::vector<bool> in_train(n, false);
    for (std::size_t i : spec.train_indices) {
      if (i >= n)
        throw Error(ErrorCode::index_out_of_range, "split index out of range");
      in_train[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
      (in_train[i] ? out.train_idx : out.test_idx).push_back(i);
  } else {
    // Seeded Fisher-Yates; the seed alone fixes the partition.
    Rng rng(spec.seed);
    for (std::size_t i = n; i > 1; --i)
      std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    std::size_t n_train, n_val = 0, n_test;
    if (spec.kind == SplitSpec::Kind::official_counts) {
      if (spec.train_count + spec.val_count + spec.test_count > n)
        throw Error(ErrorCode::counts_exceed_n,
                    "split counts exceed dataset size");
      n_train = spec.train_count;
      n_val = spec.val_count;
      n_test = spec.test_count;
    } else {
      if (!(spec.train_frac > 0.0 && spec.train_frac <= 1.0))
        throw Error(ErrorCode::counts_exceed_n,
                    "train fraction outside (0, 1]");
      n_train = std::size_t(std::llround(spec.train_frac * double(n)));
      n_train = std::min(n_train, n);
      n_test = n - n_train;
    }
    out.train_idx.assign(perm.begin(), perm.begin() + n_train);
    out.val_idx.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
    out.test_idx.assign(perm.begin() + n_train + n_val,
                        perm.begin() + n_train + n_val + n_test);
  }
  out.train = take_rows(d, out.train_idx);
  if (!out.val_idx.empty()) out.val = take_rows(d, out.val_idx);
  out.test = take_rows(d, out.test_idx);
  return out;
}

LabeledDataset synth_dataset(std::size_t n, std::size_t d,
                             const GeneratorSpec& gen, std::uint64_t seed) {
  if (n < 1 || d < 1)
    throw Error(ErrorCode::bad_generator_spec, "need n >= 1 and d >= 1");
  if (gen.noise_sd < 0.0)
    throw Error(ErrorCode::bad_generator_spec, "noise_sd must be >= 0");
  if (gen.kind == GeneratorSpec::Kind::linear && gen.weights.size() != d)
    throw Error(ErrorCode::bad_generator_spec,
                "linear generator needs d weights");
  if (gen.kind == GeneratorSpec::Kind::product_pairs) {
    if (gen.pairs.empty())
      throw Error(ErrorCode::bad_generator_spec, "no product pairs given");
    for (auto [a, b] : gen.pairs)
      if (a >= d || b >= d)
        throw Error(ErrorCode::bad_generator_spec,
                    "product pair index out of range");
  }

  LabeledDataset out;
  for (std::size_t j = 0; j < d; ++j)
    out.feature_names.push_back("f" + std::to_string(j));
  out.values.resize(n * d);
  out.targets.resize(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    // centered features: products of independent draws carry no linear
    // component, so interaction-only targets stay invisible to linear fits
    for (std::size_t j = 0; j < d; ++j)
      out.values[i * d + j] = 2.0 * uniform01(rng) - 1.0;
    double y = 0.0;
    if (gen.kind == GeneratorSpec::Kind::linear) {
      y = gen.intercept;
      for (std::size_t j = 0; j < d; ++j)
        y += gen.weights[j] * out.values[i * d + j];
    } else {
      for (auto [a, b] : gen.pairs)
        y += out.values[i * d + a] * out.values[i * d + b];
    }
    if (gen.noise_sd > 0.0) y += normal(rng, 0.0, gen.noise_sd);
    out.targets[i] = y;
  }
  out.validate();
  return out;
}

AttributeDistribution attribute_distribution(const LabeledDataset& d) {
  AttributeDistribution dist;
  dist.feature_names = d.feature_names;
  dist.negative.assign(d.d(), 0);
  dist.null.assign(d.d(), 0);
  dist.positive.assign(d.d(), 0);
  for (std::size_t i = 0; i < d.n(); ++i)
    for (std::size_t j = 0; j < d.d(); ++j) {
      double v = d.at(i, j);
      if (v < 0.0)
        ++dist.negative[j];
      else if (v == 0.0)
        ++dist.null[j];
      else
        ++dist.positive[j];
    }
  return dist;
}

void write_sidecar(const LabeledDataset& d, const std::string& csv_path,
                   const std::vector<std::size_t>* split_indices) {
  std::ofstream out(csv_path + ".meta.json");
  if (!out) throw Error(ErrorCode::io_error, "cannot write sidecar");
  out << "{\n  \"schema_tag\": \"" << schema_tag_name(d.schema_tag) << "\"";
  for (const auto& [k, v] : d.metadata)
    out << ",\n  \"" << k << "\": \"" << v << "\"";
  if (split_indices) {
    out << ",\n  \"split_indices\": [";
    for (std::size_t i = 0; i < split_indices->size(); ++i)
      out << (i ? "," : "") << (*split_indices)[i];
    out << "]";
  }
  out << "\n}\n";
}

}  // namespace aesth::tabular
