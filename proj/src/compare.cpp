#include "echoscope/compare.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "echoscope/diet.hpp"
#include "echoscope/error.hpp"
#include "echoscope/leaning.hpp"
#include "echoscope/text.hpp"

namespace echoscope {

namespace {

// A CSV with a header row and a label column.
struct LabeledTable {
  std::vector<std::string> columns;  // excluding the label column
  std::vector<std::string> rows;
  std::vector<std::vector<std::string>> cells;

  std::size_t column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw SchemaError("column missing: " + name);
    return static_cast<std::size_t>(it - columns.begin());
  }
  std::optional<std::size_t> row(const std::string& name) const {
    auto it = std::find(rows.begin(), rows.end(), name);
    if (it == rows.end()) return std::nullopt;
    return static_cast<std::size_t>(it - rows.begin());
  }
  double value(std::size_t r, std::size_t c) const {
    const auto& s = cells.at(r).at(c);
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      throw DataQualityError("non-numeric cell '" + s + "'");
    }
  }
};

LabeledTable read_table(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  LabeledTable t;
  std::string line;
  std::vector<std::string> fields;
  bool header = true;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    if (!text::split_delimited(line, ',', fields) || fields.empty())
      throw DataQualityError("malformed row in " + file.string());
    if (header) {
      t.columns.assign(fields.begin() + 1, fields.end());
      header = false;
      continue;
    }
    t.rows.push_back(fields[0]);
    t.cells.emplace_back(fields.begin() + 1, fields.end());
    if (t.cells.back().size() != t.columns.size()) throw DataQualityError("ragged row in " + file.string());
  }
  return t;
}

std::vector<std::string> common_rows(const LabeledTable& a, const LabeledTable& b) {
  std::vector<std::string> out;
  for (const auto& r : a.rows)
    if (b.row(r)) out.push_back(r);
  return out;
}

double tau_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return kendall_tau_b(x, y);
  } catch (const UndefinedMetricError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::vector<CompareLine> compare_bundles(const std::filesystem::path& a, const std::filesystem::path& b,
                                         const CompareOptions& opt) {
  std::vector<CompareLine> out;
  auto tau_line = [&](std::string subject, const std::vector<double>& x, const std::vector<double>& y) {
    const double t = tau_or_nan(x, y);
    out.push_back({"kendall_tau", std::move(subject), t, opt.min_tau, t >= opt.min_tau});
  };

  {
    auto ra = read_table(a / "matrix_R.csv"), rb = read_table(b / "matrix_R.csv");
    auto nodes = common_rows(ra, rb);
    std::vector<double> x, y;
    for (const auto& i : nodes)
      for (const auto& j : nodes) {
        if (i == j) continue;
        x.push_back(ra.value(*ra.row(i), ra.column(j)));
        y.push_back(rb.value(*rb.row(i), rb.column(j)));
      }
    tau_line("rescaled_matrix", x, y);
  }
  {
    static const char* kCats[] = {"left", "left-center", "least-biased", "right-center",
                                  "right", "extreme-right", "unreported"};
    auto da = read_table(a / "bias_shares.csv"), db = read_table(b / "bias_shares.csv");
    std::vector<double> x, y;
    for (const auto& p : common_rows(da, db))
      for (const char* c : kCats) {
        x.push_back(da.value(*da.row(p), da.column(c)));
        y.push_back(db.value(*db.row(p), db.column(c)));
      }
    tau_line("bias_shares", x, y);
  }
  {
    const auto name = fmt::format("similarity_k{}.csv", opt.similarity_k);
    auto sa = read_table(a / name), sb = read_table(b / name);
    auto nodes = common_rows(sa, sb);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        x.push_back(sa.value(*sa.row(nodes[i]), sa.column(nodes[j])));
        y.push_back(sb.value(*sb.row(nodes[i]), sb.column(nodes[j])));
      }
    tau_line(fmt::format("similarity_k{}", opt.similarity_k), x, y);
  }

  std::vector<std::filesystem::path> hists;
  for (const auto& e : std::filesystem::directory_iterator(a)) {
    const auto name = e.path().filename().string();
    if (name.rfind("leaning_hist_", 0) == 0 && e.path().extension() == ".csv") hists.push_back(e.path());
  }
  std::sort(hists.begin(), hists.end());
  for (const auto& ha : hists) {
    const auto other = b / ha.filename();
    if (!std::filesystem::exists(other)) continue;
    auto ta = read_table(ha), tb = read_table(other);
    if (ta.rows.size() != tb.rows.size()) throw ArgumentError("histograms in the two bundles use different binning");
    std::vector<double> x, y;
    for (std::size_t r = 0; r < ta.rows.size(); ++r) {
      x.push_back(ta.value(r, ta.column("users")));
      y.push_back(tb.value(r, tb.column("users")));
    }
    const double js = jensen_shannon(x, y);
    auto subject = ha.stem().string().substr(std::string("leaning_hist_").size());
    out.push_back({"jensen_shannon", subject, js, opt.max_js, js <= opt.max_js});
  }
  return out;
}

std::string compare_csv(const std::vector<CompareLine>& lines) {
  std::string out = "metric,subject,value,threshold,pass\n";
  for (const auto& l : lines)
    out += fmt::format("{},{},{},{},{}\n", l.metric, text::csv_escape(l.subject), text::fixed(l.value),
                       text::fixed(l.threshold, 3), l.pass ? "yes" : "no");
  return out;
}

}  // namespace echoscope
