#include "sadf/error.hpp"

namespace sadf {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::usage: return "UsageError";
    case Errc::wrong_column_count: return "WrongColumnCount";
    case Errc::unparsable_numeric: return "UnparsableNumeric";
    case Errc::no_time_feature: return "NoTimeFeature";
    case Errc::insufficient_rows: return "InsufficientRows";
    case Errc::empty_training: return "EmptyTraining";
    case Errc::policy_kind_mismatch: return "PolicyKindMismatch";
    case Errc::missing_value_under_strict: return "MissingValueUnderStrict";
    case Errc::unknown_feature: return "UnknownFeature";
    case Errc::single_class_training: return "SingleClassTraining";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::encoder_model_mismatch: return "EncoderModelMismatch";
    case Errc::source_unreadable: return "SourceUnreadable";
    case Errc::sink_write_failure: return "SinkWriteFailure";
    case Errc::io_failure: return "IoFailure";
    case Errc::bad_format: return "BadFormat";
  }
  return "Unknown";
}

}  // namespace sadf
