#pragma once

#include "freqsynth/dataset.hpp"
#include "freqsynth/eval.hpp"
#include "freqsynth/forecast.hpp"
#include "freqsynth/sampling_rate.hpp"
#include "freqsynth/spectral.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freqsynth::dataio {

namespace fs = std::filesystem;

// LTSF layout: first column is the date (ignored on load), the rest are
// channels named by the header. Throws MissingHeader, RaggedRows,
// NonNumericCell (with the cell location), EmptyDataset or IoError.
Dataset load_csv(const fs::path& path);
Dataset parse_csv(std::string_view text, const std::string& source = "<memory>");

// Date column is the 0-based step index; values at 17 significant digits.
// The file is written atomically. Throws EmptyDataset or IoError.
void save_csv(const Dataset& ds, const fs::path& path);
std::string format_csv(const Dataset& ds);

struct DatasetRegistryEntry {
  std::string id;
  fs::path path; // may be empty; resolved against the registry's directory
  SamplingRate rate;
  std::string sector;
};

// JSON array of {"id", "rate", optional "path", optional "sector"}.
// Throws DuplicateId, UnknownSamplingRate, InvalidConfig or IoError.
std::vector<DatasetRegistryEntry> load_registry(const fs::path& path);
std::vector<DatasetRegistryEntry> parse_registry(std::string_view json_text, const fs::path& base_dir = {});

// `frequency,power`; frequency at 12 significant digits, power at 17.
std::string format_periodogram_csv(const spectral::Periodogram<double>& p);

// {"L", "H", "lambda", "weights": row-major}; doubles round-trip exactly.
std::string model_to_json(const forecast::LinearForecaster& model);
forecast::LinearForecaster model_from_json(std::string_view json_text);

std::string reports_to_json(std::span<const eval::EvalReport> reports);
std::string reports_to_csv(std::span<const eval::EvalReport> reports);

// Matrix with a header row of column ids and a leading column of row ids.
std::string format_matrix_csv(std::span<const std::string> row_ids, std::span<const std::string> col_ids,
                              const Eigen::Ref<const Eigen::MatrixXd>& values);

std::string read_text(const fs::path& path);

// Writes via a temporary sibling file and rename, so readers never see a
// partial file. Throws IoError naming the path.
void write_atomic(const fs::path& path, std::string_view content);

} // namespace freqsynth::dataio
