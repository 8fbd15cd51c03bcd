#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sadf {

enum class Errc {
  usage,
  wrong_column_count,
  unparsable_numeric,
  no_time_feature,
  insufficient_rows,
  empty_training,
  policy_kind_mismatch,
  missing_value_under_strict,
  unknown_feature,
  single_class_training,
  dimension_mismatch,
  encoder_model_mismatch,
  source_unreadable,
  sink_write_failure,
  io_failure,
  bad_format,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sadf
