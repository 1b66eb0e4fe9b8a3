#include "freqsynth/spectral.hpp"

#include <fmt/format.h>

namespace freqsynth::spectral {

Periodogram<double> aggregate_periodogram(const Dataset& ds, Eigen::Index window_len) {
  if (window_len < kMinAggregateWindow) {
    throw Error(ErrorCode::InvalidWindow,
                fmt::format("aggregation window must be >= {}, got {}", kMinAggregateWindow, window_len));
  }
  if (ds.channels() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no channels");
  if (window_len > ds.length()) {
    throw Error(ErrorCode::WindowTooLong,
                fmt::format("window {} exceeds series length {}", window_len, ds.length()));
  }

  const Eigen::Index per_channel = ds.length() / window_len;
  Periodogram<double> acc;
  Eigen::Index count = 0;
  for (Eigen::Index c = 0; c < ds.channels(); ++c) {
    for (Eigen::Index w = 0; w < per_channel; ++w) {
      auto p = scaled_periodogram(ds.values.row(c).segment(w * window_len, window_len).transpose());
      if (count == 0) {
        acc = std::move(p);
      } else {
        acc.powers += p.powers;
      }
      ++count;
    }
  }
  acc.powers /= static_cast<double>(count);
  return acc;
}

Eigen::Index default_window(Eigen::Index n) {
  Eigen::Index w = kMinAggregateWindow;
  while (w * 2 <= n && w * 2 <= 1024) w *= 2;
  return w;
}

double dataset_pcc(const Dataset& a, const Dataset& b) {
  return periodogram_pcc(aggregate_periodogram(a, default_window(a.length())),
                         aggregate_periodogram(b, default_window(b.length())));
}

} // namespace freqsynth::spectral
