#include "freqsynth/dataset.hpp"

#include "freqsynth/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace freqsynth {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NoDominantFrequency: return "NoDominantFrequency";
    case ErrorCode::UnknownSamplingRate: return "UnknownSamplingRate";
    case ErrorCode::InvalidPeriod: return "InvalidPeriod";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidAmplitudeScale: return "InvalidAmplitudeScale";
    case ErrorCode::DegenerateChannel: return "DegenerateChannel";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::PeriodTooLong: return "PeriodTooLong";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::SplitTooSmall: return "SplitTooSmall";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

struct RateEntry {
  std::string_view token;
  int steps;
};

// Sub-daily rates anchor the daily cycle, daily data the weekly one, and
// 4-second data the hourly one.
constexpr std::array<RateEntry, 8> kRateTable{{
    {"4s", 900},
    {"1m", 1440},
    {"5m", 288},
    {"10m", 144},
    {"15m", 96},
    {"30m", 48},
    {"1h", 24},
    {"1d", 7},
}};

} // namespace

SamplingRate SamplingRate::parse(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  for (const auto& entry : kRateTable) {
    if (lower == entry.token) return SamplingRate(lower, entry.steps);
  }

  constexpr std::string_view custom = "custom:";
  if (lower.starts_with(custom)) {
    const std::string_view digits = std::string_view(lower).substr(custom.size());
    long long steps = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), steps);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
      throw Error(ErrorCode::UnknownSamplingRate,
                  fmt::format("custom rate needs an integer period, got '{}'", token));
    }
    if (steps < 3 || steps > 1'000'000'000) {
      throw Error(ErrorCode::InvalidPeriod,
                  fmt::format("custom period must be an integer >= 3, got {}", steps));
    }
    return SamplingRate(lower, static_cast<int>(steps));
  }

  throw Error(ErrorCode::UnknownSamplingRate, fmt::format("unsupported sampling rate '{}'", token));
}

void Dataset::validate() const {
  if (static_cast<Eigen::Index>(channel_names.size()) != values.rows()) {
    throw Error(ErrorCode::InvalidSeries,
                fmt::format("{} channel names for {} channels", channel_names.size(), values.rows()));
  }
  if (!values.allFinite()) throw Error(ErrorCode::InvalidSeries, "dataset contains NaN or Inf");
}

Dataset make_dataset(RowMatrix values, std::string provenance) {
  Dataset ds;
  ds.channel_names.reserve(static_cast<std::size_t>(values.rows()));
  for (Eigen::Index i = 0; i < values.rows(); ++i) ds.channel_names.push_back(fmt::format("c{}", i));
  ds.values = std::move(values);
  ds.provenance = std::move(provenance);
  return ds;
}

ChannelStats channel_stats(const Dataset& ds) {
  if (ds.length() == 0) throw Error(ErrorCode::EmptyDataset, "cannot compute statistics of an empty dataset");
  ChannelStats stats;
  stats.mean = ds.values.rowwise().mean();
  stats.stddev.resize(ds.channels());
  for (Eigen::Index c = 0; c < ds.channels(); ++c) {
    const double var = (ds.values.row(c).array() - stats.mean[c]).square().mean();
    stats.stddev[c] = std::sqrt(var);
  }
  return stats;
}

Dataset apply_stats(const Dataset& ds, const ChannelStats& stats) {
  if (stats.mean.size() != ds.channels() || stats.stddev.size() != ds.channels()) {
    throw Error(ErrorCode::ShapeMismatch, "statistics do not match the channel count");
  }
  Dataset out = ds;
  for (Eigen::Index c = 0; c < ds.channels(); ++c) {
    if (!(stats.stddev[c] > 0.0)) {
      throw Error(ErrorCode::DegenerateChannel,
                  fmt::format("channel '{}' has zero variance", ds.channel_names[static_cast<std::size_t>(c)]));
    }
    out.values.row(c) = (ds.values.row(c).array() - stats.mean[c]) / stats.stddev[c];
  }
  out.standardized = true;
  return out;
}

Dataset slice(const Dataset& ds, Eigen::Index begin, Eigen::Index end) {
  Dataset out;
  out.values = ds.values.middleCols(begin, end - begin);
  out.channel_names = ds.channel_names;
  out.rate = ds.rate;
  out.provenance = ds.provenance;
  out.standardized = false;
  return out;
}

} // namespace freqsynth
