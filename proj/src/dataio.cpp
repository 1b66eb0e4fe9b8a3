#include "freqsynth/dataio.hpp"

#include "freqsynth/error.hpp"

#include <fmt/format.h>

#include "json.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unordered_set>

#include <unistd.h>

namespace freqsynth::dataio {

using nlohmann::json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}' for reading", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, fmt::format("failed reading '{}'", path.string()));
  return buf.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + fmt::format(".tmp-{}", ::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}' for writing", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, fmt::format("failed writing '{}'", path.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, fmt::format("cannot move output into '{}'", path.string()));
  }
}

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (const char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

} // namespace

Dataset parse_csv(std::string_view text, const std::string& source) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorCode::MissingHeader, fmt::format("'{}' is empty", source));

  const auto header = split_fields(lines.front());
  if (header.size() < 2) {
    throw Error(ErrorCode::MissingHeader, fmt::format("'{}' needs a header with a date column and channels", source));
  }
  bool header_numeric = true;
  for (std::size_t c = 1; c < header.size(); ++c) {
    double v = 0.0;
    header_numeric = header_numeric && parse_double(header[c], v);
  }
  if (header_numeric) throw Error(ErrorCode::MissingHeader, fmt::format("'{}' starts with a data row", source));

  const std::size_t channels = header.size() - 1;
  const std::size_t rows = lines.size() - 1;
  if (rows == 0) throw Error(ErrorCode::EmptyDataset, fmt::format("'{}' has no data rows", source));

  RowMatrix values(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::RaggedRows,
                  fmt::format("'{}' row {} has {} fields, header has {}", source, r + 1, fields.size(), header.size()),
                  CellLocation{r + 1, fields.size()});
    }
    for (std::size_t c = 0; c < channels; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c + 1], v) || !std::isfinite(v)) {
        throw Error(ErrorCode::NonNumericCell,
                    fmt::format("'{}' row {} column {}: '{}' is not a finite number", source, r + 1, c + 2,
                                fields[c + 1]),
                    CellLocation{r + 1, c + 2});
      }
      values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
    }
  }

  Dataset ds;
  ds.values = std::move(values);
  for (std::size_t c = 1; c < header.size(); ++c) ds.channel_names.emplace_back(trim(header[c]));
  ds.provenance = source;
  return ds;
}

Dataset load_csv(const fs::path& path) {
  return parse_csv(read_text(path), path.string());
}

std::string format_csv(const Dataset& ds) {
  if (ds.channels() == 0 || ds.length() == 0) throw Error(ErrorCode::EmptyDataset, "cannot write an empty dataset");
  ds.validate();
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "date");
  for (const auto& name : ds.channel_names) fmt::format_to(std::back_inserter(out), ",{}", quote_field(name));
  out.push_back('\n');
  for (Eigen::Index t = 0; t < ds.length(); ++t) {
    fmt::format_to(std::back_inserter(out), "{}", t);
    for (Eigen::Index c = 0; c < ds.channels(); ++c) fmt::format_to(std::back_inserter(out), ",{:.17g}", ds.values(c, t));
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

void save_csv(const Dataset& ds, const fs::path& path) {
  write_atomic(path, format_csv(ds));
}

std::vector<DatasetRegistryEntry> parse_registry(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("registry is not valid JSON: {}", e.what()));
  }
  if (!doc.is_array()) throw Error(ErrorCode::InvalidConfig, "registry must be a JSON array");

  std::vector<DatasetRegistryEntry> entries;
  std::unordered_set<std::string> seen;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("id") || !item.contains("rate") || !item["id"].is_string() ||
        !item["rate"].is_string()) {
      throw Error(ErrorCode::InvalidConfig, "registry entries need string keys 'id' and 'rate'");
    }
    const auto id = item["id"].get<std::string>();
    if (id.empty()) throw Error(ErrorCode::InvalidConfig, "registry id must be nonempty");
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateId, fmt::format("registry id '{}' repeats", id));
    auto rate = SamplingRate::parse(item["rate"].get<std::string>());
    fs::path path;
    if (item.contains("path")) {
      path = item["path"].get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    }
    std::string sector = item.contains("sector") ? item["sector"].get<std::string>() : std::string();
    entries.push_back({id, std::move(path), std::move(rate), std::move(sector)});
  }
  return entries;
}

std::vector<DatasetRegistryEntry> load_registry(const fs::path& path) {
  return parse_registry(read_text(path), path.parent_path());
}

std::string format_periodogram_csv(const spectral::Periodogram<double>& p) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "frequency,power\n");
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    fmt::format_to(std::back_inserter(out), "{:.12g},{:.17g}\n", p.freqs[j], p.powers[j]);
  }
  return fmt::to_string(out);
}

std::string model_to_json(const forecast::LinearForecaster& model) {
  json doc;
  doc["L"] = model.lookback_len;
  doc["H"] = model.horizon_len;
  doc["lambda"] = model.lambda;
  json weights = json::array();
  for (Eigen::Index r = 0; r < model.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.weights.cols(); ++c) weights.push_back(model.weights(r, c));
  }
  doc["weights"] = std::move(weights);
  return doc.dump() + "\n";
}

forecast::LinearForecaster model_from_json(std::string_view json_text) {
  try {
    const json doc = json::parse(json_text);
    forecast::LinearForecaster model;
    model.lookback_len = doc.at("L").get<Eigen::Index>();
    model.horizon_len = doc.at("H").get<Eigen::Index>();
    model.lambda = doc.at("lambda").get<double>();
    const auto& w = doc.at("weights");
    if (model.lookback_len < 1 || model.horizon_len < 1 ||
        static_cast<Eigen::Index>(w.size()) != model.horizon_len * (model.lookback_len + 1)) {
      throw Error(ErrorCode::InvalidConfig, "model weights do not match L and H");
    }
    model.weights.resize(model.horizon_len, model.lookback_len + 1);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < model.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < model.weights.cols(); ++c) model.weights(r, c) = w[k++].get<double>();
    }
    if (!model.weights.allFinite()) throw Error(ErrorCode::InvalidConfig, "model weights are not finite");
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, fmt::format("bad model JSON: {}", e.what()));
  }
}

std::string reports_to_json(std::span<const eval::EvalReport> reports) {
  json doc = json::array();
  for (const auto& r : reports) {
    doc.push_back({{"dataset", r.dataset},
                   {"horizon", r.horizon},
                   {"mse", r.mse},
                   {"mae", r.mae},
                   {"model", r.model},
                   {"seed", r.seed},
                   {"windows", r.windows}});
  }
  return doc.dump(2) + "\n";
}

std::string reports_to_csv(std::span<const eval::EvalReport> reports) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "dataset,horizon,mse,mae,model,seed\n");
  for (const auto& r : reports) {
    fmt::format_to(std::back_inserter(out), "{},{},{:.17g},{:.17g},{},{}\n", quote_field(r.dataset), r.horizon, r.mse,
                   r.mae, quote_field(r.model), r.seed);
  }
  return fmt::to_string(out);
}

std::string format_matrix_csv(std::span<const std::string> row_ids, std::span<const std::string> col_ids,
                              const Eigen::Ref<const Eigen::MatrixXd>& values) {
  if (static_cast<Eigen::Index>(row_ids.size()) != values.rows() ||
      static_cast<Eigen::Index>(col_ids.size()) != values.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "matrix labels do not match its shape");
  }
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "train\\test");
  for (const auto& id : col_ids) fmt::format_to(std::back_inserter(out), ",{}", quote_field(id));
  out.push_back('\n');
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    fmt::format_to(std::back_inserter(out), "{}", quote_field(row_ids[static_cast<std::size_t>(r)]));
    for (Eigen::Index c = 0; c < values.cols(); ++c) fmt::format_to(std::back_inserter(out), ",{:.17g}", values(r, c));
    out.push_back('\n');
  }
  return fmt::to_string(out);
}

} // namespace freqsynth::dataio
