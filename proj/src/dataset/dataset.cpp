#include "dataset/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "common/error.hpp"

namespace mocg::dataset {

const char* to_string(VariableKind kind) {
  return kind == VariableKind::Categorical ? "categorical" : "continuous";
}

VariableKind parse_kind(std::string_view text) {
  if (text == "categorical" || text == "Categorical" || text == "cat") return VariableKind::Categorical;
  if (text == "continuous" || text == "Continuous" || text == "cont") return VariableKind::Continuous;
  fail(ErrorCode::InvalidArgument, "unknown variable kind '" + std::string(text) + "'");
}

MixedDataset::MixedDataset(std::vector<VariableSpec> variables, Eigen::MatrixXd values,
                           std::size_t dropped_rows)
    : variables_(std::move(variables)), values_(std::move(values)), dropped_rows_(dropped_rows) {
  if (static_cast<std::size_t>(values_.cols()) != variables_.size())
    fail(ErrorCode::InvalidArgument, "value table width does not match variable count");
  std::unordered_set<std::string> seen;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    const auto& v = variables_[j];
    if (!seen.insert(v.name).second)
      fail(ErrorCode::InvalidArgument, "duplicate variable name '" + v.name + "'");
    if (v.categorical()) {
      if (v.categories.size() < 2)
        fail(ErrorCode::InvalidArgument,
             "categorical variable '" + v.name + "' needs at least 2 categories");
      const double c = static_cast<double>(v.categories.size());
      for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        const double code = values_(i, static_cast<Eigen::Index>(j));
        if (code < 0 || code >= c || code != std::floor(code))
          fail(ErrorCode::InvalidArgument, "category index out of range in '" + v.name + "'");
      }
    } else if (!v.categories.empty()) {
      fail(ErrorCode::InvalidArgument, "continuous variable '" + v.name + "' has categories");
    }
  }
  if (!values_.allFinite()) fail(ErrorCode::InvalidArgument, "dataset contains non-finite values");
}

std::optional<std::size_t> MixedDataset::find(std::string_view name) const {
  for (std::size_t j = 0; j < variables_.size(); ++j)
    if (variables_[j].name == name) return j;
  return std::nullopt;
}

std::size_t MixedDataset::index_of(std::string_view name) const {
  if (auto j = find(name)) return *j;
  fail(ErrorCode::NotFound, "unknown variable '" + std::string(name) + "'");
}

std::vector<std::size_t> MixedDataset::indices_of(const std::vector<std::string>& names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(index_of(n));
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// RFC 4180-style record splitter: quoted fields may contain commas, doubled
// quotes and newlines.
std::vector<std::vector<std::string>> parse_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_was_quoted = false, any = false;
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

  auto end_field = [&] {
    record.push_back(field_was_quoted ? field : std::string(trim(field)));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
    any = false;
  };

  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    any = true;
    if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) fail(ErrorCode::InvalidArgument, "unterminated quoted field in CSV");
  if (any || !field.empty() || !record.empty()) end_record();
  return records;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  double v = 0;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_integral(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

MixedDataset load_csv(std::string_view bytes, const TypeOverrides& overrides) {
  auto records = parse_records(bytes);
  if (records.empty()) fail(ErrorCode::InvalidArgument, "CSV has no header row");

  const auto header = records.front();
  const std::size_t d = header.size();
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : header) {
      if (name.empty()) fail(ErrorCode::InvalidArgument, "empty header name");
      if (!seen.insert(name).second)
        fail(ErrorCode::InvalidArgument, "duplicate header name '" + name + "'",
             {{"name", name}});
    }
  }
  for (const auto& [name, kind] : overrides) {
    if (std::find(header.begin(), header.end(), name) == header.end())
      fail(ErrorCode::NotFound, "type override for unknown column '" + name + "'");
  }

  std::vector<const std::vector<std::string>*> kept;
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != d)
      fail(ErrorCode::InvalidArgument,
           "CSV record " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) +
               " fields, expected " + std::to_string(d));
    const bool missing = std::any_of(rec.begin(), rec.end(), [](const auto& f) { return f.empty(); });
    if (missing) {
      ++dropped;
      continue;
    }
    kept.push_back(&rec);
  }
  if (kept.empty()) fail(ErrorCode::InvalidArgument, "no data rows left after dropping missing values");

  const std::size_t n = kept.size();
  std::vector<VariableSpec> vars(d);
  Eigen::MatrixXd values(n, d);

  for (std::size_t j = 0; j < d; ++j) {
    VariableSpec& spec = vars[j];
    spec.name = header[j];

    std::vector<double> numeric(n);
    bool all_numeric = true;
    for (std::size_t i = 0; i < n; ++i) {
      auto v = parse_number((*kept[i])[j]);
      if (!v) {
        all_numeric = false;
        break;
      }
      numeric[i] = *v;
    }

    const auto ov = overrides.find(spec.name);
    bool categorical;
    if (ov != overrides.end()) {
      categorical = ov->second == VariableKind::Categorical;
      if (!categorical && !all_numeric)
        fail(ErrorCode::InvalidArgument,
             "column '" + spec.name + "' overridden as continuous but holds non-numeric values");
    } else if (!all_numeric) {
      categorical = true;
    } else {
      std::set<double> distinct;
      bool integral = true;
      for (double v : numeric) {
        integral = integral && v == std::floor(v);
        distinct.insert(v);
        if (distinct.size() > kCategoricalDistinctLimit) break;
      }
      categorical = integral && distinct.size() <= kCategoricalDistinctLimit;
    }

    if (!categorical) {
      spec.kind = VariableKind::Continuous;
      for (std::size_t i = 0; i < n; ++i) values(i, j) = numeric[i];
      continue;
    }

    spec.kind = VariableKind::Categorical;
    if (all_numeric) {
      // Numeric codes keep their numeric order so index codes stay monotone in the value.
      std::vector<double> levels(numeric);
      std::sort(levels.begin(), levels.end());
      levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
      for (double lv : levels) {
        if (lv == std::floor(lv) && std::abs(lv) < 9e15) {
          spec.categories.push_back(format_integral(lv));
        } else {
          const auto first = std::find(numeric.begin(), numeric.end(), lv) - numeric.begin();
          spec.categories.push_back((*kept[static_cast<std::size_t>(first)])[j]);
        }
      }
      for (std::size_t i = 0; i < n; ++i)
        values(i, j) = static_cast<double>(
            std::lower_bound(levels.begin(), levels.end(), numeric[i]) - levels.begin());
    } else {
      std::unordered_map<std::string, std::size_t> index;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = (*kept[i])[j];
        auto [it, inserted] = index.emplace(cell, spec.categories.size());
        if (inserted) spec.categories.push_back(cell);
        values(i, j) = static_cast<double>(it->second);
      }
    }
    if (spec.categories.size() < 2)
      fail(ErrorCode::InvalidArgument,
           "categorical column '" + spec.name + "' has a single distinct value",
           {{"column", spec.name}});
  }

  return MixedDataset(std::move(vars), std::move(values), dropped);
}

nlohmann::json variables_json(const MixedDataset& ds) {
  auto arr = nlohmann::json::array();
  for (const auto& v : ds.variables()) {
    nlohmann::json item{{"name", v.name}, {"kind", to_string(v.kind)}};
    item["categories"] = v.categorical() ? nlohmann::json(v.categories) : nlohmann::json(nullptr);
    arr.push_back(std::move(item));
  }
  return arr;
}

nlohmann::json to_json(const MixedDataset& ds) {
  nlohmann::json doc;
  doc["variables"] = variables_json(ds);
  auto rows = nlohmann::json::array();
  const auto& vals = ds.values();
  for (Eigen::Index i = 0; i < vals.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < vals.cols(); ++j) {
      if (ds.variable(static_cast<std::size_t>(j)).categorical())
        row.push_back(static_cast<long long>(vals(i, j)));
      else
        row.push_back(vals(i, j));
    }
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  doc["row_count"] = ds.row_count();
  doc["dropped_rows"] = ds.dropped_rows();
  return doc;
}

MixedDataset dataset_from_json(const nlohmann::json& doc) {
  try {
    std::vector<VariableSpec> vars;
    for (const auto& item : doc.at("variables")) {
      VariableSpec v;
      v.name = item.at("name").get<std::string>();
      v.kind = parse_kind(item.at("kind").get<std::string>());
      if (item.contains("categories") && item["categories"].is_array())
        v.categories = item["categories"].get<std::vector<std::string>>();
      vars.push_back(std::move(v));
    }
    const auto& rows = doc.at("rows");
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(vars.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != vars.size())
        fail(ErrorCode::InvalidArgument, "row " + std::to_string(i) + " has wrong width");
      for (std::size_t j = 0; j < vars.size(); ++j) values(i, j) = rows[i][j].get<double>();
    }
    return MixedDataset(std::move(vars), std::move(values), doc.value("dropped_rows", std::size_t{0}));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("malformed dataset JSON: ") + e.what());
  }
}

}  // namespace mocg::dataset
