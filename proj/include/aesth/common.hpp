#ifndef AESTH_COMMON_HPP
#define AESTH_COMMON_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace aesth {

enum class ErrorCode : int {
  ok = 0,
  missing_target_column,
  non_numeric_cell,
  empty_table,
  range_violation,
  wrong_column_set,
  empty_vote_list,
  out_of_scale_vote,
  counts_exceed_n,
  bad_generator_spec,
  empty_train_set,
  dimension_mismatch,
  zero_variance,
  non_convergence,
  not_linear_kernel,
  empty_batch,
  shape_mismatch,
  k_exceeds_n,
  too_many_features,
  singular_system,
  missing_covers,
  empty_input,
  index_out_of_range,
  length_mismatch,
  zero_variance_target,
  constant_input,
  rank_deficient,
  missing_input,
  unknown_kind,
  incompatible_explain_method,
  io_error,
  bad_config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

using VecView = std::span<const double>;

}  // namespace aesth

#endif
