#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace freqsynth {

enum class ErrorCode {
  InvalidSeries,
  WindowTooLong,
  DegenerateSpectrum,
  NoDominantFrequency,
  UnknownSamplingRate,
  InvalidPeriod,
  InvalidConfig,
  InvalidAmplitudeScale,
  DegenerateChannel,
  InsufficientData,
  InvalidWindow,
  PeriodTooLong,
  EmptyTrainingSet,
  SplitTooSmall,
  ShapeMismatch,
  MissingHeader,
  RaggedRows,
  NonNumericCell,
  EmptyDataset,
  DuplicateId,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Location of a bad cell in a CSV file: 1-based data row (header excluded)
// and 1-based file column (the date column is column 1).
struct CellLocation {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const CellLocation&) const = default;
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Error(ErrorCode code, const std::string& message, CellLocation cell)
      : Error(code, message) {
    cell_ = cell;
  }

  ErrorCode code() const noexcept { return code_; }
  const std::optional<CellLocation>& cell() const noexcept { return cell_; }

private:
  ErrorCode code_;
  std::optional<CellLocation> cell_;
};

} // namespace freqsynth
