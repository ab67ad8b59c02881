#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace mocg::dataset {

enum class VariableKind { Categorical, Continuous };

const char* to_string(VariableKind kind);
VariableKind parse_kind(std::string_view text);

struct VariableSpec {
  std::string name;
  VariableKind kind = VariableKind::Continuous;
  // Ordered labels; category index i denotes categories[i]. Empty for Continuous.
  std::vector<std::string> categories;

  bool categorical() const { return kind == VariableKind::Categorical; }
  std::size_t category_count() const { return categories.size(); }
};

using TypeOverrides = std::map<std::string, VariableKind, std::less<>>;

// Column-typed table. Categorical cells hold the category index as a double.
// Immutable after construction.
class MixedDataset {
 public:
  MixedDataset(std::vector<VariableSpec> variables, Eigen::MatrixXd values,
               std::size_t dropped_rows = 0);

  const std::vector<VariableSpec>& variables() const { return variables_; }
  const VariableSpec& variable(std::size_t j) const { return variables_.at(j); }
  std::size_t row_count() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t column_count() const { return variables_.size(); }
  std::size_t dropped_rows() const { return dropped_rows_; }

  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::Ref<const Eigen::VectorXd> column(std::size_t j) const { return values_.col(j); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws NotFound for unknown names.
  std::size_t index_of(std::string_view name) const;
  std::vector<std::size_t> indices_of(const std::vector<std::string>& names) const;

 private:
  std::vector<VariableSpec> variables_;
  Eigen::MatrixXd values_;
  std::size_t dropped_rows_ = 0;
};

// Comma-separated, header row first. A column is categorical when overridden,
// when any cell is non-numeric, or when it holds at most 10 distinct integral
// values. Rows containing an empty cell are dropped and counted.
MixedDataset load_csv(std::string_view bytes, const TypeOverrides& overrides = {});

constexpr std::size_t kCategoricalDistinctLimit = 10;

nlohmann::json to_json(const MixedDataset& ds);
MixedDataset dataset_from_json(const nlohmann::json& doc);
nlohmann::json variables_json(const MixedDataset& ds);

// --- correlations ---------------------------------------------------------

struct CorrelationEntry {
  std::string variable;
  double r = 0.0;
  bool constant = false;  // one side had zero variance; r forced to 0
};

struct CorrelationReport {
  std::string outcome;
  std::vector<CorrelationEntry> entries;  // |r| descending, ties by name
};

// Pearson coefficient; sets *constant and returns 0 when either side has no spread.
double pearson(const Eigen::Ref<const Eigen::VectorXd>& x,
               const Eigen::Ref<const Eigen::VectorXd>& y, bool* constant = nullptr);

CorrelationReport pearson_correlations(const MixedDataset& ds, std::string_view outcome);
std::vector<std::string> top_n(const CorrelationReport& report, std::size_t n);
nlohmann::json to_json(const CorrelationReport& report);

// --- pairwise summaries for the variable matrix ----------------------------

enum class PairKind { CatCat, CatCont, ContCont };
const char* to_string(PairKind kind);

struct CountTable {
  std::vector<std::string> row_categories;
  std::vector<std::string> col_categories;
  std::vector<std::vector<std::size_t>> counts;  // row_categories × col_categories
};

struct GroupStats {
  std::string category;
  std::size_t count = 0;
  // Present when count > 0.
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
};

struct GroupedSummary {
  std::string categorical;  // which of the two variables defines the groups
  std::string continuous;
  std::vector<GroupStats> groups;
};

struct PointSample {
  std::vector<std::size_t> rows;   // ascending row indices
  std::vector<double> x, y;
};

struct PairSummary {
  std::string row_variable;
  std::string col_variable;
  PairKind kind = PairKind::ContCont;
  std::variant<CountTable, GroupedSummary, PointSample> payload;
};

struct PairMatrix {
  std::vector<std::string> variables;
  std::vector<std::vector<PairSummary>> cells;  // full, non-triangular
};

constexpr std::size_t kDefaultSampleCap = 2000;

PairMatrix pairwise_summaries(const MixedDataset& ds, const std::vector<std::string>& vars,
                              std::size_t sample_cap = kDefaultSampleCap);
nlohmann::json to_json(const PairMatrix& matrix);

// Linear-interpolated quantile of sorted data (q in [0,1]).
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace mocg::dataset
