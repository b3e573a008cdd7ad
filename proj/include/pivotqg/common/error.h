#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pivotqg {

enum class Errc {
  EmptyInput,
  InvalidUtf8,
  RangeOutOfBounds,
  OverlappingEdits,
  EmptySpan,
  SpanMisaligned,
  MalformedTags,
  AnnotatorUnavailable,
  NonFiniteInput,
  ShapeMismatch,
  SequenceTooLong,
  QuestionTooLong,
  EmptyDataset,
  DivergedLoss,
  DegenerateValidation,
  InvalidConfig,
  BadCheckpoint,
  BadData,
  NotFound,
  UnresolvedFlags,
  ModelUnavailable,
  UnknownFormat,
  InvalidSpan,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pivotqg
