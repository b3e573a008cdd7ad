#include "pivotqg/common/error.h"

namespace pivotqg {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidUtf8: return "InvalidUtf8";
    case Errc::RangeOutOfBounds: return "RangeOutOfBounds";
    case Errc::OverlappingEdits: return "OverlappingEdits";
    case Errc::EmptySpan: return "EmptySpan";
    case Errc::SpanMisaligned: return "SpanMisaligned";
    case Errc::MalformedTags: return "MalformedTags";
    case Errc::AnnotatorUnavailable: return "AnnotatorUnavailable";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SequenceTooLong: return "SequenceTooLong";
    case Errc::QuestionTooLong: return "QuestionTooLong";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::DivergedLoss: return "DivergedLoss";
    case Errc::DegenerateValidation: return "DegenerateValidation";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::BadCheckpoint: return "BadCheckpoint";
    case Errc::BadData: return "BadData";
    case Errc::NotFound: return "NotFound";
    case Errc::UnresolvedFlags: return "UnresolvedFlags";
    case Errc::ModelUnavailable: return "ModelUnavailable";
    case Errc::UnknownFormat: return "UnknownFormat";
    case Errc::InvalidSpan: return "InvalidSpan";
  }
  return "Unknown";
}

}  // namespace pivotqg
