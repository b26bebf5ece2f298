#ifndef AESTH_MODEL_IO_HPP
#define AESTH_MODEL_IO_HPP

#include <string>
#include <variant>

#include "aesth/eval.hpp"
#include "aesth/mlp.hpp"
#include "aesth/svr.hpp"
#include "aesth/trees.hpp"

namespace aesth::io {

using AnyModel = std::variant<trees::ForestModel, trees::BoostedModel,
                              svr::SvrModel, mlp::MlpModel,
                              eval::LinearModel>;

const char* model_kind_name(const AnyModel& m);
std::size_t model_n_features(const AnyModel& m);
double model_predict(const AnyModel& m, VecView x);

// Shared JSON schema: {model_kind, params, seed, trees/base_score or the
// family-specific parameter arrays}. Round-trip exact for finite doubles.
std::string model_to_json(const AnyModel& m);
AnyModel model_from_json(const std::string& text);

void save_model(const AnyModel& m, const std::string& path);
AnyModel load_model(const std::string& path);

}  // namespace aesth::io

#endif
