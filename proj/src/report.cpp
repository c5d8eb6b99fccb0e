#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include <json.hpp>

#include "echoscope/pipeline.hpp"
#include "echoscope/text.hpp"

namespace echoscope {

using json = nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  std::string out;
  out.reserve(len * 2);
  for (unsigned int k = 0; k < len; ++k) out += fmt::format("{:02x}", md[k]);
  return out;
}

namespace {

// Order used for bias tables and charts.
constexpr Bias kChartOrder[] = {Bias::ExtremeLeft, Bias::Left,  Bias::LeftCenter,   Bias::LeastBiased,
                                Bias::RightCenter, Bias::Right, Bias::ExtremeRight, Bias::Unreported};

const char* bias_color(Bias b) {
  switch (b) {
    case Bias::ExtremeLeft: return "#08306b";
    case Bias::Left: return "#2171b5";
    case Bias::LeftCenter: return "#9ecae1";
    case Bias::LeastBiased: return "#d9d9d9";
    case Bias::RightCenter: return "#fcae91";
    case Bias::Right: return "#de2d26";
    case Bias::ExtremeRight: return "#67000d";
    case Bias::Unreported: return "#969696";
  }
  return "#969696";
}

std::string file_token(const PlatformId& p) {
  std::string out;
  for (char c : p.str()) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

std::string xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

std::string svg_open(int w, int h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n",
      w, h);
}

std::string bias_shares_csv(const DietOutputs& d) {
  std::string out = "platform,total_urls";
  for (Bias b : kChartOrder) out += "," + std::string(to_string(b));
  out += ",excluded_extreme_left\n";
  for (const auto& p : d.profiles) {
    out += text::csv_escape(p.platform.str()) + "," + std::to_string(p.total_urls);
    for (Bias b : kChartOrder) out += "," + text::fixed(p.bias_shares.at(b));
    out += "," + std::to_string(p.excluded_extreme_left) + "\n";
  }
  return out;
}

std::string bias_shares_svg(const DietOutputs& d) {
  const int bar_h = 22, gap = 8, left = 90, width = 420;
  const int h = 40 + static_cast<int>(d.profiles.size()) * (bar_h + gap) + 40;
  std::string out = svg_open(left + width + 20, h);
  int y = 20;
  for (const auto& p : d.profiles) {
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", left - 6, y + 15, xml(p.platform.str()));
    double x = left;
    for (Bias b : kChartOrder) {
      const double w = p.bias_shares.at(b) * width;
      if (w <= 0) continue;
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{}\" width=\"{:.2f}\" height=\"{}\" fill=\"{}\"><title>{} {:.1f}%</title></rect>\n",
                         x, y, w, bar_h, bias_color(b), to_string(b), 100 * p.bias_shares.at(b));
      x += w;
    }
    y += bar_h + gap;
  }
  int lx = left;
  for (Bias b : kChartOrder) {
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>", lx, y + 8, bias_color(b));
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"8\">{}</text>\n", lx + 12, y + 17, to_string(b));
    lx += 54;
  }
  out += "</svg>\n";
  return out;
}

std::string top_domains_csv(const DietOutputs& d, const SourceCatalog& catalog, std::size_t k) {
  std::string out = "platform,rank,domain,label,count,percent,bias,questionable,color\n";
  for (const auto& p : d.profiles) {
    std::size_t rank = 0;
    for (const auto& r : top_domains(p, k)) {
      const auto label = catalog.lookup(r.domain);
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", text::csv_escape(p.platform.str()), ++rank, r.domain,
                         r.domain + (label.questionable ? "*" : ""), r.count, text::fixed(r.percent, 2),
                         to_string(label.bias), label.questionable ? 1 : 0, bias_color(label.bias));
    }
  }
  return out;
}

std::string similarity_svg(const SimilarityNetwork& net, const DietOutputs& d) {
  const std::size_t n = net.nodes.size();
  const double cx = 260, cy = 260, radius = 190;
  std::map<PlatformId, const DietProfile*> prof;
  for (const auto& p : d.profiles) prof[p.platform] = &p;
  std::size_t max_total = 1;
  for (const auto& p : d.profiles) max_total = std::max(max_total, p.total_urls);

  std::vector<std::pair<double, double>> pos(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n) - std::numbers::pi / 2;
    pos[i] = {cx + radius * std::cos(a), cy + radius * std::sin(a)};
  }
  std::string out = svg_open(520, 520);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = net.similarity(i, j);
      if (s <= 0) continue;
      out += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#555\" "
                         "stroke-opacity=\"{:.3f}\" stroke-width=\"{:.2f}\"/>\n",
                         pos[i].first, pos[i].second, pos[j].first, pos[j].second, s, 0.5 + 6 * s);
    }
  for (std::size_t i = 0; i < n; ++i) {
    const auto* p = prof.at(net.nodes[i]);
    const double r = 10 + 26 * std::sqrt(static_cast<double>(p->total_urls) / static_cast<double>(max_total));
    const double qshare = p->labeled_urls ? static_cast<double>(p->questionable_urls) / static_cast<double>(p->labeled_urls) : 0;
    const auto [x, y] = pos[i];
    out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"{:.1f}\" fill=\"#4daf4a\"/>\n", x, y, r);
    if (qshare >= 1) {
      out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"{:.1f}\" fill=\"#e41a1c\"/>\n", x, y, r);
    } else if (qshare > 0) {
      // Pie wedge for the questionable share, starting at twelve o'clock.
      const double a = 2 * std::numbers::pi * qshare;
      const double ex = x + r * std::sin(a), ey = y - r * std::cos(a);
      out += fmt::format("<path d=\"M{:.1f},{:.1f} L{:.1f},{:.1f} A{:.1f},{:.1f} 0 {} 1 {:.1f},{:.1f} Z\" fill=\"#e41a1c\"/>\n",
                         x, y, x, y - r, r, r, qshare > 0.5 ? 1 : 0, ex, ey);
    }
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x, y + r + 12,
                       xml(net.nodes[i].str()));
  }
  out += "</svg>\n";
  return out;
}

std::string leaning_csv(const LeaningDistribution& h) {
  std::string out = "bin_lo,bin_hi,users,questionable_urls\n";
  for (std::size_t k = 0; k < h.users.size(); ++k)
    out += text::fixed(h.bin_edges[k]) + "," + text::fixed(h.bin_edges[k + 1]) + "," + std::to_string(h.users[k]) +
           "," + std::to_string(h.questionable[k]) + "\n";
  return out;
}

std::string leaning_svg(const LeaningDistribution& h) {
  const int w = 480, hgt = 220, left = 40, bottom = 190;
  std::size_t peak = 1;
  for (auto c : h.users) peak = std::max(peak, c);
  std::size_t qpeak = 1;
  for (auto c : h.questionable) qpeak = std::max(qpeak, c);
  const double bw = static_cast<double>(w - left - 10) / static_cast<double>(h.users.size());
  std::string out = svg_open(w, hgt);
  out += fmt::format("<text x=\"{}\" y=\"14\">{} (users={}, sigma2={})</text>\n", left, xml(h.platform.str()), h.n_users,
                     text::fixed(h.sigma2, 4));
  for (std::size_t k = 0; k < h.users.size(); ++k) {
    const double bh = 160.0 * static_cast<double>(h.users[k]) / static_cast<double>(peak);
    const int shade = static_cast<int>(std::lround(220 - 180 * static_cast<double>(h.questionable[k]) / static_cast<double>(qpeak)));
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"rgb(230,{},{})\"/>\n",
                       left + bw * static_cast<double>(k), bottom - bh, bw * 0.95, bh, shade, shade);
  }
  out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000\"/>\n", left, bottom, w - 10, bottom);
  out += fmt::format("<text x=\"{}\" y=\"{}\">-1</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\">+1</text>\n", left,
                     bottom + 14, w - 10, bottom + 14);
  out += "</svg>\n";
  return out;
}

std::string users_csv(const std::vector<UserProfile>& profiles, const PlatformId& p) {
  std::vector<std::pair<std::string, const UserProfile*>> rows;
  for (const auto& u : profiles)
    if (u.platform == p) rows.emplace_back(sha256_hex(u.platform.str() + "\t" + u.user_id).substr(0, 16), &u);
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "user_hash,n,x,v,questionable_count\n";
  for (const auto& [hash, u] : rows)
    out += hash + "," + std::to_string(u->n) + "," + text::fixed(u->x) + "," + text::fixed(u->v) + "," +
           std::to_string(u->questionable_count) + "\n";
  return out;
}

std::string data_quality_csv(const ReportBundle& b) {
  std::string out = "platform,metric,value\n";
  auto row = [&out](const PlatformId& p, std::string_view metric, const std::string& value) {
    out += text::csv_escape(p.str()) + "," + std::string(metric) + "," + value + "\n";
  };
  for (const auto& p : b.platforms) {
    auto it = b.ingest_stats.find(p);
    if (it != b.ingest_stats.end()) {
      const auto& s = it->second;
      row(p, "lines_total", std::to_string(s.read.total_lines));
      row(p, "lines_emitted", std::to_string(s.read.emitted));
      row(p, "lines_skipped_malformed", std::to_string(s.read.skipped));
      row(p, "posts_dropped_keyword", std::to_string(s.dropped_keyword));
      row(p, "posts_dropped_window", std::to_string(s.dropped_window));
      row(p, "posts_dropped_community", std::to_string(s.dropped_community));
      row(p, "posts_kept", std::to_string(s.posts_kept));
      row(p, "urls_seen", std::to_string(s.urls_seen));
      row(p, "urls_unparseable", std::to_string(s.url_parse_errors));
      row(p, "urls_invalid_domain", std::to_string(s.invalid_domains));
      row(p, "urls_unexpanded_shortener", std::to_string(s.unexpanded_shorteners));
      for (const auto& [cat, n] : s.excluded) row(p, "urls_excluded_" + cat, std::to_string(n));
      row(p, "links_kept", std::to_string(s.links_kept));
    }
    auto lp = b.links_per_platform.find(p);
    row(p, "links_recount", std::to_string(lp == b.links_per_platform.end() ? 0 : lp->second));
    if (b.diet) {
      for (const auto& prof : b.diet->profiles) {
        if (prof.platform != p) continue;
        row(p, "external_urls", std::to_string(prof.total_urls));
        row(p, "unreported_share", text::fixed(prof.bias_shares.at(Bias::Unreported)));
        row(p, "excluded_extreme_left", std::to_string(prof.excluded_extreme_left));
      }
    }
  }
  return out;
}

std::string run_manifest_json(const ReportBundle& b) {
  json j;
  j["tool"] = "echoscope";
  j["config_sha256"] = b.config_hash;
  j["catalog_version"] = b.catalog_version;
  j["monte_carlo_seed"] = b.mc_seed;
  json platforms = json::array();
  for (const auto& p : b.platforms) platforms.push_back(p.str());
  j["platforms"] = platforms;
  json notes = json::object();
  for (const auto& p : b.platforms)
    if (p.str() == "YouTube" || p.str() == "BitChute")
      notes[p.str()] = "accounts are content producers (channels), not consumers";
  j["notes"] = notes;
  j["warnings"] = b.warnings;
  j["config"] = json::parse(b.config_json);
  return j.dump(2) + "\n";
}

}  // namespace

std::map<std::string, std::string> render(const ReportBundle& b) {
  std::map<std::string, std::string> files;
  if (b.table1) files["table1.csv"] = table1_csv(*b.table1);
  if (b.graph) {
    const auto& g = *b.graph;
    files["matrix_W.csv"] = matrix_csv(g.graph.nodes, g.graph.W);
    files["matrix_E.csv"] = matrix_csv(g.graph.nodes, g.expected, 9);
    files["matrix_R.csv"] = matrix_csv(g.graph.nodes, g.rescaled.R, 9);
    files["matrix_MC_mean.csv"] = matrix_csv(g.graph.nodes, g.monte_carlo.mean, 6);
    files["matrix_MC_stderr.csv"] = matrix_csv(g.graph.nodes, g.monte_carlo.std_error, 6);
    files["heatmap_R.svg"] = heatmap_svg(g.rescaled);
    std::string pr = "platform,pagerank\n";
    for (std::size_t k = 0; k < g.graph.nodes.size(); ++k)
      pr += text::csv_escape(g.graph.nodes[k].str()) + "," + text::fixed(g.pagerank[k], 9) + "\n";
    files["pagerank.csv"] = pr;
  }
  if (b.diet) {
    const auto& d = *b.diet;
    files["bias_shares.csv"] = bias_shares_csv(d);
    files["bias_shares.svg"] = bias_shares_svg(d);
    if (b.catalog) files["top_domains.csv"] = top_domains_csv(d, *b.catalog, 10);
    for (const auto& [k, net] : d.similarity) files[fmt::format("similarity_k{}.csv", k)] = matrix_csv(net.nodes, net.similarity);
    std::string sweep = "k_a,k_b,kendall_tau\n";
    for (auto a = d.similarity.begin(); a != d.similarity.end(); ++a)
      for (auto c = std::next(a); c != d.similarity.end(); ++c) {
        double tau = std::numeric_limits<double>::quiet_NaN();
        try {
          tau = kendall_tau_b(upper_triangle(a->second.similarity), upper_triangle(c->second.similarity));
        } catch (const UndefinedMetricError&) {
        }
        sweep += fmt::format("{},{},{}\n", a->first, c->first, text::fixed(tau));
      }
    files["similarity_kendall.csv"] = sweep;
    auto primary = d.similarity.find(d.primary_k);
    if (primary != d.similarity.end()) files["similarity_network.svg"] = similarity_svg(primary->second, d);
  }
  if (b.users) {
    const auto& u = *b.users;
    std::string density = "platform,bin_lo,bin_hi,density\n";
    std::string summary = "platform,users,median,q1,q3,iqr\n";
    for (const auto& p : b.platforms) {
      files["users_" + file_token(p) + ".csv"] = users_csv(u.profiles, p);
      auto h = u.histograms.find(p);
      if (h == u.histograms.end()) continue;
      files["leaning_hist_" + file_token(p) + ".csv"] = leaning_csv(h->second);
      files["leaning_hist_" + file_token(p) + ".svg"] = leaning_svg(h->second);
      const auto& v = u.variance.at(p);
      for (std::size_t k = 0; k < v.density.size(); ++k)
        density += text::csv_escape(p.str()) + "," + text::fixed(v.bin_edges[k]) + "," + text::fixed(v.bin_edges[k + 1]) +
                   "," + text::fixed(v.density[k]) + "\n";
      summary += fmt::format("{},{},{},{},{},{}\n", text::csv_escape(p.str()), h->second.n_users, text::fixed(v.median),
                             text::fixed(v.q1), text::fixed(v.q3), text::fixed(v.iqr()));
    }
    files["variance_density.csv"] = density;
    files["variance_summary.csv"] = summary;
  }
  files["data_quality.csv"] = data_quality_csv(b);
  files["run_manifest.json"] = run_manifest_json(b);
  return files;
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<FileEntry> emit(const ReportBundle& bundle, const std::filesystem::path& outdir_in, bool keep_existing) {
  namespace fs = std::filesystem;
  if (bundle.empty()) throw ArgumentError("refusing to emit an empty bundle");
  auto files = render(bundle);

  fs::path outdir = fs::absolute(outdir_in).lexically_normal();
  if (!outdir.has_filename()) outdir = outdir.parent_path();
  const fs::path parent = outdir.parent_path();
  const fs::path staging = parent / ("." + outdir.filename().string() + ".staging");
  const fs::path retired = parent / ("." + outdir.filename().string() + ".old");

  std::error_code ec;
  fs::create_directories(parent, ec);
  fs::remove_all(staging, ec);
  if (!fs::create_directory(staging, ec) || ec)
    throw IoError("cannot create staging directory " + staging.string() + ": " + ec.message());

  try {
    if (keep_existing && fs::is_directory(outdir)) {
      for (const auto& entry : fs::directory_iterator(outdir)) {
        const auto name = entry.path().filename().string();
        if (!entry.is_regular_file() || name == "FAILED" || name == "manifest.json" || files.count(name)) continue;
        files[name] = slurp(entry.path());
      }
    }
    std::vector<FileEntry> manifest;
    for (const auto& [name, content] : files) {
      std::ofstream out(staging / name, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw IoError("cannot write " + (staging / name).string());
      manifest.push_back({name, sha256_hex(content), content.size()});
    }
    json m;
    m["files"] = json::array();
    for (const auto& f : manifest) m["files"].push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    {
      std::ofstream out(staging / "manifest.json", std::ios::binary | std::ios::trunc);
      out << m.dump(2) << "\n";
      if (!out) throw IoError("cannot write manifest");
    }

    fs::remove_all(retired, ec);
    if (fs::exists(outdir)) fs::rename(outdir, retired);
    fs::rename(staging, outdir);
    fs::remove_all(retired, ec);
    return manifest;
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw IoError(std::string("emit failed: ") + e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace echoscope
