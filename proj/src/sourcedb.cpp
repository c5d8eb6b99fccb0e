#include "echoscope/sourcedb.hpp"

#include <fstream>
#include <sstream>

#include "echoscope/error.hpp"
#include "echoscope/text.hpp"

namespace echoscope {

std::string_view to_string(Bias b) {
  switch (b) {
    case Bias::ExtremeLeft: return "extreme-left";
    case Bias::Left: return "left";
    case Bias::LeftCenter: return "left-center";
    case Bias::LeastBiased: return "least-biased";
    case Bias::RightCenter: return "right-center";
    case Bias::Right: return "right";
    case Bias::ExtremeRight: return "extreme-right";
    case Bias::Unreported: return "unreported";
  }
  return "unreported";
}

std::optional<Bias> parse_bias(std::string_view s) {
  auto t = text::to_lower(text::trim(s));
  for (Bias b : kAllBiases)
    if (t == to_string(b)) return b;
  if (t == "center") return Bias::LeastBiased;
  return std::nullopt;
}

double bias_score(Bias b) {
  switch (b) {
    case Bias::ExtremeLeft: return -1.0;
    case Bias::Left: return -0.66;
    case Bias::LeftCenter: return -0.33;
    case Bias::LeastBiased: return 0.0;
    case Bias::RightCenter: return 0.33;
    case Bias::Right: return 0.66;
    case Bias::ExtremeRight: return 1.0;
    case Bias::Unreported: break;
  }
  throw NoScoreError("unreported domains carry no leaning score");
}

Bias mirror(Bias b) {
  switch (b) {
    case Bias::ExtremeLeft: return Bias::ExtremeRight;
    case Bias::Left: return Bias::Right;
    case Bias::LeftCenter: return Bias::RightCenter;
    case Bias::RightCenter: return Bias::LeftCenter;
    case Bias::Right: return Bias::Left;
    case Bias::ExtremeRight: return Bias::ExtremeLeft;
    default: return b;
  }
}

std::string_view to_string(Provenance p) {
  return p == Provenance::Catalog ? "catalog" : "manual-override";
}

DomainLabel SourceCatalog::lookup(std::string_view domain) const {
  if (const auto* hit = find(domain)) return *hit;
  DomainLabel miss;
  miss.domain = std::string(domain);
  return miss;
}

const DomainLabel* SourceCatalog::find(std::string_view domain) const {
  auto it = entries_.find(domain);
  return it == entries_.end() ? nullptr : &it->second;
}

std::map<Bias, std::size_t> SourceCatalog::counts() const {
  std::map<Bias, std::size_t> out;
  for (const auto& [_, label] : entries_) ++out[label.bias];
  return out;
}

std::string SourceCatalog::serialize() const {
  std::string out = "version," + text::csv_escape(version_) + "\n";
  for (const auto& [domain, l] : entries_) {
    out += domain;
    out += ',';
    out += to_string(l.bias);
    out += l.questionable ? ",1," : ",0,";
    out += to_string(l.provenance);
    out += ',';
    out += text::csv_escape(l.note);
    out += '\n';
  }
  return out;
}

namespace {

bool truthy(std::string_view s) {
  auto t = text::to_lower(text::trim(s));
  return t == "1" || t == "true" || t == "yes";
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void CatalogBuilder::add_catalog_table(std::string_view contents, std::string_view origin) {
  add_table(contents, origin, Provenance::Catalog);
}

void CatalogBuilder::add_override_table(std::string_view contents, std::string_view origin) {
  add_table(contents, origin, Provenance::ManualOverride);
}

void CatalogBuilder::add_table(std::string_view contents, std::string_view origin,
                               Provenance provenance) {
  std::istringstream in{std::string(contents)};
  std::string line;
  std::vector<std::string> fields;
  std::map<std::string, std::size_t> col;
  bool have_header = false;
  std::size_t lineno = 0;
  auto warn = [&](const std::string& msg) {
    catalog_.warnings_.push_back(std::string(origin) + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    if (!text::split_delimited(line, ',', fields)) {
      if (!have_header) throw SchemaError(std::string(origin) + ": unreadable header");
      warn("unparseable row skipped");
      continue;
    }
    if (!have_header) {
      for (std::size_t i = 0; i < fields.size(); ++i) col[text::to_lower(text::trim(fields[i]))] = i;
      std::vector<std::string> required = {"domain", "bias", "questionable", "factuality"};
      if (provenance == Provenance::ManualOverride) required.push_back("note");
      for (const auto& r : required)
        if (!col.count(r)) throw SchemaError(std::string(origin) + ": missing column '" + r + "'");
      have_header = true;
      continue;
    }
    if (fields.size() < col.size()) {
      warn("short row skipped");
      continue;
    }
    auto field = [&](const char* name) -> std::string_view { return fields[col.at(name)]; };

    std::string domain;
    try {
      domain = psl_->registrable_domain(normalize_url(field("domain")).host);
    } catch (const Error& e) {
      warn(std::string("domain rejected: ") + e.what());
      continue;
    }
    auto bias = parse_bias(field("bias"));
    if (!bias || *bias == Bias::Unreported) {
      warn("unknown bias '" + std::string(field("bias")) + "' for " + domain);
      continue;
    }
    DomainLabel label;
    label.domain = domain;
    label.bias = *bias;
    label.questionable = truthy(field("questionable")) ||
                         text::to_lower(text::trim(field("factuality"))) == "conspiracy/pseudoscience";
    label.provenance = provenance;
    if (provenance == Provenance::ManualOverride) {
      label.note = std::string(text::trim(field("note")));
      if (label.note.empty()) {
        warn("override for " + domain + " lacks a note");
        continue;
      }
    }

    auto seen = seen_.find(domain);
    if (seen != seen_.end()) {
      if (seen->second == Provenance::ManualOverride || provenance == Provenance::Catalog) {
        warn("duplicate domain " + domain + " ignored (first entry wins)");
        continue;
      }
    }
    seen_[domain] = provenance;
    catalog_.entries_.insert_or_assign(domain, std::move(label));
  }
  if (!have_header) throw EmptyCatalogError(std::string(origin) + ": empty table");
}

SourceCatalog CatalogBuilder::finish(std::string version) {
  if (catalog_.entries_.empty()) throw EmptyCatalogError("catalog has no valid rows");
  catalog_.version_ = std::move(version);
  seen_.clear();
  return std::move(catalog_);
}

SourceCatalog load_catalog(const std::filesystem::path& catalog, const PublicSuffixList& psl,
                           const std::optional<std::filesystem::path>& overrides, std::string version) {
  CatalogBuilder builder(psl);
  builder.add_catalog_table(slurp(catalog), catalog.filename().string());
  if (overrides) builder.add_override_table(slurp(*overrides), overrides->filename().string());
  return builder.finish(std::move(version));
}

}  // namespace echoscope
