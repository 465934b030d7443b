#include "zgt2/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "zgt2/error.hpp"
#include "zgt2/rng.hpp"

namespace zgt2 {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(std::string_view cell, double& value) {
  cell = unquote(cell);
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value);
}

}  // namespace

Table parse_csv(std::string_view text, std::string_view target_column, std::string_view origin) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    ++line_no;
    const auto line = trim(text.substr(start, pos - start));
    if (!line.empty()) lines.emplace_back(line_no, line);
    start = pos + 1;
  }
  if (lines.empty()) throw DataError(std::string(origin) + ": file is empty");

  const std::string_view header = lines.front().second;
  const auto semis = std::count(header.begin(), header.end(), ';');
  const auto commas = std::count(header.begin(), header.end(), ',');
  const char delim = semis > commas ? ';' : ',';

  std::vector<std::string> names;
  for (auto f : split_fields(header, delim)) names.emplace_back(unquote(f));
  if (names.size() < 2) {
    throw DataError(std::string(origin) + ": need at least one feature and one target column");
  }

  std::size_t target = names.size() - 1;
  if (target_column != "last") {
    const auto it = std::find(names.begin(), names.end(), target_column);
    if (it == names.end()) {
      throw DataError(std::string(origin) + ": no column named '" + std::string(target_column) +
                      "'");
    }
    target = static_cast<std::size_t>(it - names.begin());
  }

  Table table;
  table.target_name = names[target];
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i != target) table.feature_names.push_back(names[i]);
  }
  table.features = Matrix(0, names.size() - 1);

  std::vector<double> row(names.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [number, line] = lines[li];
    const auto fields = split_fields(line, delim);
    if (fields.size() != names.size()) {
      std::ostringstream msg;
      msg << origin << ": row " << number << " has " << fields.size() << " fields, expected "
          << names.size();
      throw DataError(msg.str());
    }
    std::size_t out = 0;
    double target_value = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      double v = 0.0;
      if (!parse_number(fields[i], v)) {
        std::ostringstream msg;
        msg << origin << ": row " << number << ", column '" << names[i]
            << "' is not a finite number: '" << trim(fields[i]) << "'";
        throw DataError(msg.str());
      }
      if (i == target) {
        target_value = v;
      } else {
        row[out++] = v;
      }
    }
    table.features.append_row(row);
    table.targets.push_back(target_value);
  }
  if (table.targets.empty()) throw DataError(std::string(origin) + ": table has no data rows");
  return table;
}

Table load_csv(const std::filesystem::path& path, std::string_view target_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), target_column, path.string());
}

Table select_rows(const Table& table, std::span<const std::size_t> rows) {
  Table out;
  out.feature_names = table.feature_names;
  out.target_name = table.target_name;
  out.features = Matrix(0, table.features.cols());
  out.targets.reserve(rows.size());
  for (auto r : rows) {
    out.features.append_row(table.features.row(r));
    out.targets.push_back(table.targets[r]);
  }
  return out;
}

std::size_t train_split_size(std::size_t n, double ratio) {
  // Guard against ratio*n landing a hair above an integer.
  return static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
}

std::pair<Table, Table> split(const Table& table, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  const std::size_t n = table.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  const std::size_t n_train = std::min(train_split_size(n, ratio), n);
  return {select_rows(table, std::span(idx).first(n_train)),
          select_rows(table, std::span(idx).subspan(n_train))};
}

namespace {

ColumnStats column_stats(std::span<const double> values) {
  ColumnStats s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

}  // namespace

Normalizer fit_normalizer(const Table& train, std::vector<std::string>* dropped) {
  if (train.size() == 0) throw DataError("cannot fit normalisation on an empty table");
  Normalizer norm;
  norm.target_name = train.target_name;
  std::vector<double> col(train.size());
  for (std::size_t c = 0; c < train.features.cols(); ++c) {
    for (std::size_t r = 0; r < train.size(); ++r) col[r] = train.features(r, c);
    const auto s = column_stats(col);
    if (!(s.std > 0.0)) {
      std::clog << "warning: dropping constant column '" << train.feature_names[c] << "'\n";
      if (dropped) dropped->push_back(train.feature_names[c]);
      continue;
    }
    norm.feature_names.push_back(train.feature_names[c]);
    norm.feature_stats.push_back(s);
  }
  if (norm.feature_names.empty()) throw DataError("every feature column has zero variance");
  norm.target_stats = column_stats(train.targets);
  if (!(norm.target_stats.std > 0.0)) throw DataError("target column has zero variance");
  return norm;
}

Dataset apply_normalizer(const Normalizer& normalizer, const Table& table) {
  std::vector<std::size_t> source;
  for (const auto& name : normalizer.feature_names) {
    const auto it = std::find(table.feature_names.begin(), table.feature_names.end(), name);
    if (it == table.feature_names.end()) {
      throw DataError("dataset lacks feature column '" + name + "'");
    }
    source.push_back(static_cast<std::size_t>(it - table.feature_names.begin()));
  }
  Dataset ds;
  ds.normalizer = normalizer;
  ds.features = Matrix(table.size(), source.size());
  ds.targets.resize(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < source.size(); ++c) {
      const auto& s = normalizer.feature_stats[c];
      ds.features(r, c) = (table.features(r, source[c]) - s.mean) / s.std;
    }
    ds.targets[r] = normalizer.normalize_target(table.targets[r]);
  }
  return ds;
}

std::pair<Dataset, Dataset> zscore_fit_apply(const Table& train, const Table& test) {
  std::vector<std::string> dropped;
  const auto norm = fit_normalizer(train, &dropped);
  auto a = apply_normalizer(norm, train);
  auto b = apply_normalizer(norm, test);
  a.dropped_columns = dropped;
  b.dropped_columns = dropped;
  return {std::move(a), std::move(b)};
}

}  // namespace zgt2
