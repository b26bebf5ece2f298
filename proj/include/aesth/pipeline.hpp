#ifndef AESTH_PIPELINE_HPP
#define AESTH_PIPELINE_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aesth/common.hpp"
#include "aesth/dataset.hpp"
#include "aesth/model_io.hpp"
#include "aesth/shapley.hpp"

namespace aesth::pipeline {

// Resolved experiment configuration. The CLI layers flag > config file >
// default before constructing one of these; the JSON codec below is the
// wire format shared with the C API.
struct ExperimentConfig {
  std::string data_path;                 // CSV with an 'overall' column
  std::string schema = "generic";        // generic | aadb | eva | para
  std::string split = "fraction:0.8";    // fraction:F | counts:T:V:E | official
  std::string model = "rf";              // rf | gbt | svr | svr-linear | mlp | ols
  std::string explain = "auto";          // auto | exact | kernel | tree | none
  std::string background = "kmeans:3";   // kmeans:K | full | mean
  std::uint64_t seed = 0;
  std::string out_dir = "runs";
  std::string run_name;                  // empty: seed-derived directory name
  std::map<std::string, double> model_params;  // family-specific overrides
  std::size_t max_explained = 0;         // 0: explain every test row
};

std::string config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const std::string& text);

struct RunArtifacts {
  std::string run_dir;
  std::string model_file;
  std::string metrics_file;
  std::string attribution_file;
  std::string ranking_file;
  std::string manifest_file;
};

RunArtifacts run_experiment(const ExperimentConfig& config);

// Pieces reused by the CLI subcommands.
tabular::LabeledDataset load_input(const ExperimentConfig& config);
io::AnyModel train_model(const std::string& model_kind,
                         const std::map<std::string, double>& params,
                         const tabular::LabeledDataset& train,
                         std::uint64_t seed);
shapley::BackgroundSet resolve_background(const std::string& spec,
                                          const tabular::LabeledDataset& train,
                                          std::uint64_t seed);
std::vector<shapley::Attribution> explain_instances(
    const io::AnyModel& model, const std::string& method,
    const tabular::LabeledDataset& rows,
    const shapley::BackgroundSet& background, std::uint64_t seed,
    std::size_t limit = 0);

void write_attributions_csv(const std::string& path,
                            const std::vector<std::string>& feature_names,
                            const std::vector<shapley::Attribution>& attrs);
std::pair<std::vector<std::string>, std::vector<shapley::Attribution>>
read_attributions_csv(const std::string& path);

enum class ReportFormat { csv, json, svg };

struct ReportInputs {
  std::string attributions_path;
  std::string data_path;
  std::string model_path;
  std::string schema = "generic";
  std::size_t instance = 0;  // interactions
  std::string background = "kmeans:3";
  std::uint64_t seed = 0;
};

// kind: summary | dependence:i:j | interactions | correlations | scatter:i
//       | distribution
void emit_report(const std::string& kind, const ReportInputs& inputs,
                 ReportFormat format, const std::string& out_path);

std::uint64_t fnv1a_file(const std::string& path);
void atomic_write(const std::string& path, const std::string& content);

}  // namespace aesth::pipeline

#endif
