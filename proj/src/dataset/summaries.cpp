#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "dataset/dataset.hpp"

namespace mocg::dataset {

double pearson(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               bool* constant) {
  if (x.size() != y.size()) fail(ErrorCode::InvalidArgument, "pearson: length mismatch");
  const auto n = x.size();
  if (constant) *constant = false;
  if (n < 2) {
    if (constant) *constant = true;
    return 0.0;
  }
  const double mx = x.mean(), my = y.mean();
  double sxx = 0, syy = 0, sxy = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0 || syy <= 0) {
    if (constant) *constant = true;
    return 0.0;
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationReport pearson_correlations(const MixedDataset& ds, std::string_view outcome) {
  const std::size_t target = ds.index_of(outcome);
  CorrelationReport report;
  report.outcome = std::string(outcome);
  for (std::size_t j = 0; j < ds.column_count(); ++j) {
    if (j == target) continue;
    CorrelationEntry e;
    e.variable = ds.variable(j).name;
    e.r = pearson(ds.column(j), ds.column(target), &e.constant);
    report.entries.push_back(std::move(e));
  }
  std::sort(report.entries.begin(), report.entries.end(), [](const auto& a, const auto& b) {
    const double aa = std::abs(a.r), bb = std::abs(b.r);
    if (aa != bb) return aa > bb;
    return a.variable < b.variable;
  });
  return report;
}

std::vector<std::string> top_n(const CorrelationReport& report, std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "top_n requires n >= 1");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < std::min(n, report.entries.size()); ++i)
    names.push_back(report.entries[i].variable);
  return names;
}

nlohmann::json to_json(const CorrelationReport& report) {
  auto entries = nlohmann::json::array();
  for (const auto& e : report.entries)
    entries.push_back({{"variable", e.variable}, {"r", e.r}, {"constant", e.constant}});
  return {{"outcome", report.outcome}, {"entries", std::move(entries)}};
}

const char* to_string(PairKind kind) {
  switch (kind) {
    case PairKind::CatCat: return "CatCat";
    case PairKind::CatCont: return "CatCont";
    case PairKind::ContCont: return "ContCont";
  }
  return "ContCont";
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) fail(ErrorCode::InvalidArgument, "quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

CountTable count_table(const MixedDataset& ds, std::size_t a, std::size_t b) {
  const auto& va = ds.variable(a);
  const auto& vb = ds.variable(b);
  CountTable t{va.categories, vb.categories,
               std::vector<std::vector<std::size_t>>(va.category_count(),
                                                     std::vector<std::size_t>(vb.category_count(), 0))};
  for (std::size_t i = 0; i < ds.row_count(); ++i) {
    const auto ca = static_cast<std::size_t>(ds.values()(i, a));
    const auto cb = static_cast<std::size_t>(ds.values()(i, b));
    ++t.counts[ca][cb];
  }
  return t;
}

GroupedSummary grouped(const MixedDataset& ds, std::size_t cat, std::size_t cont) {
  const auto& vc = ds.variable(cat);
  std::vector<std::vector<double>> buckets(vc.category_count());
  for (std::size_t i = 0; i < ds.row_count(); ++i)
    buckets[static_cast<std::size_t>(ds.values()(i, cat))].push_back(ds.values()(i, cont));

  GroupedSummary s{vc.name, ds.variable(cont).name, {}};
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    auto& vals = buckets[k];
    GroupStats g;
    g.category = vc.categories[k];
    g.count = vals.size();
    if (!vals.empty()) {
      std::sort(vals.begin(), vals.end());
      g.min = vals.front();
      g.max = vals.back();
      g.q1 = quantile_sorted(vals, 0.25);
      g.median = quantile_sorted(vals, 0.5);
      g.q3 = quantile_sorted(vals, 0.75);
      double sum = 0;
      for (double v : vals) sum += v;
      g.mean = sum / static_cast<double>(vals.size());
    }
    s.groups.push_back(std::move(g));
  }
  return s;
}

// Fixed-seed reservoir sample so the matrix view is reproducible.
PointSample sample_points(const MixedDataset& ds, std::size_t a, std::size_t b, std::size_t cap) {
  const std::size_t n = ds.row_count();
  std::vector<std::size_t> chosen;
  if (n <= cap) {
    chosen.resize(n);
    for (std::size_t i = 0; i < n; ++i) chosen[i] = i;
  } else {
    std::mt19937_64 rng(0x5eedf00dULL);
    chosen.resize(cap);
    for (std::size_t i = 0; i < cap; ++i) chosen[i] = i;
    for (std::size_t i = cap; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, i);
      const std::size_t slot = pick(rng);
      if (slot < cap) chosen[slot] = i;
    }
    std::sort(chosen.begin(), chosen.end());
  }
  PointSample s;
  s.rows = chosen;
  for (auto i : chosen) {
    s.x.push_back(ds.values()(i, a));
    s.y.push_back(ds.values()(i, b));
  }
  return s;
}

}  // namespace

PairMatrix pairwise_summaries(const MixedDataset& ds, const std::vector<std::string>& vars,
                              std::size_t sample_cap) {
  if (vars.size() < 2) fail(ErrorCode::InvalidArgument, "pairwise summaries need at least 2 variables");
  if (sample_cap == 0) fail(ErrorCode::InvalidArgument, "sample cap must be positive");
  const auto idx = ds.indices_of(vars);
  PairMatrix m{vars, {}};
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::vector<PairSummary> row;
    for (std::size_t c = 0; c < idx.size(); ++c) {
      const auto a = idx[r], b = idx[c];
      const bool ca = ds.variable(a).categorical(), cb = ds.variable(b).categorical();
      PairSummary cell;
      cell.row_variable = vars[r];
      cell.col_variable = vars[c];
      if (ca && cb) {
        cell.kind = PairKind::CatCat;
        cell.payload = count_table(ds, a, b);
      } else if (ca || cb) {
        cell.kind = PairKind::CatCont;
        cell.payload = ca ? grouped(ds, a, b) : grouped(ds, b, a);
      } else {
        cell.kind = PairKind::ContCont;
        cell.payload = sample_points(ds, a, b, sample_cap);
      }
      row.push_back(std::move(cell));
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

nlohmann::json to_json(const PairMatrix& matrix) {
  auto cells = nlohmann::json::array();
  for (const auto& row : matrix.cells) {
    auto jrow = nlohmann::json::array();
    for (const auto& cell : row) {
      nlohmann::json j{{"row", cell.row_variable}, {"col", cell.col_variable}, {"kind", to_string(cell.kind)}};
      if (const auto* t = std::get_if<CountTable>(&cell.payload)) {
        j["row_categories"] = t->row_categories;
        j["col_categories"] = t->col_categories;
        j["counts"] = t->counts;
      } else if (const auto* g = std::get_if<GroupedSummary>(&cell.payload)) {
        j["categorical"] = g->categorical;
        j["continuous"] = g->continuous;
        auto groups = nlohmann::json::array();
        for (const auto& s : g->groups) {
          nlohmann::json js{{"category", s.category}, {"count", s.count}};
          if (s.count > 0) {
            js["min"] = s.min;
            js["q1"] = s.q1;
            js["median"] = s.median;
            js["q3"] = s.q3;
            js["max"] = s.max;
            js["mean"] = s.mean;
          }
          groups.push_back(std::move(js));
        }
        j["groups"] = std::move(groups);
      } else if (const auto* p = std::get_if<PointSample>(&cell.payload)) {
        j["rows"] = p->rows;
        j["x"] = p->x;
        j["y"] = p->y;
      }
      jrow.push_back(std::move(j));
    }
    cells.push_back(std::move(jrow));
  }
  return {{"variables", matrix.variables}, {"cells", std::move(cells)}};
}

}  // namespace mocg::dataset
