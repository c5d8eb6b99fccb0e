#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "echoscope/urlkit.hpp"

namespace echoscope {

enum class Bias {
  ExtremeLeft,
  Left,
  LeftCenter,
  LeastBiased,
  RightCenter,
  Right,
  ExtremeRight,
  Unreported,
};

inline constexpr std::array<Bias, 8> kAllBiases = {
    Bias::ExtremeLeft, Bias::Left,  Bias::LeftCenter,   Bias::LeastBiased,
    Bias::RightCenter, Bias::Right, Bias::ExtremeRight, Bias::Unreported};

std::string_view to_string(Bias b);

/// Accepts the canonical hyphenated names, case-insensitively, plus
/// "center" as an alias of least-biased.
std::optional<Bias> parse_bias(std::string_view s);

/// Numeric leaning of a bias category. Throws NoScoreError for unreported.
double bias_score(Bias b);

/// Left/right reflection; least-biased and unreported map to themselves.
Bias mirror(Bias b);

enum class Provenance { Catalog, ManualOverride };
std::string_view to_string(Provenance p);

struct DomainLabel {
  std::string domain;
  Bias bias = Bias::Unreported;
  bool questionable = false;
  Provenance provenance = Provenance::Catalog;
  std::string note;  // required for manual overrides

  friend bool operator==(const DomainLabel&, const DomainLabel&) = default;
};

/// Immutable domain -> label table. Lookups never fail.
class SourceCatalog {
 public:
  SourceCatalog() = default;

  DomainLabel lookup(std::string_view domain) const;
  const DomainLabel* find(std::string_view domain) const;

  const std::map<std::string, DomainLabel, std::less<>>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::map<Bias, std::size_t> counts() const;

  const std::string& version() const noexcept { return version_; }
  void set_version(std::string v) { version_ = std::move(v); }

  /// Problems tolerated during loading (duplicates, unparseable domains).
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  /// Canonical text form; equal catalogs serialize identically.
  std::string serialize() const;

  friend class CatalogBuilder;

 private:
  std::map<std::string, DomainLabel, std::less<>> entries_;
  std::string version_;
  std::vector<std::string> warnings_;
};

/// Incremental loader. Catalog rows are first-wins; override rows replace
/// catalog rows and are first-wins among themselves.
class CatalogBuilder {
 public:
  explicit CatalogBuilder(const PublicSuffixList& psl) : psl_(&psl) {}

  void add_catalog_table(std::string_view contents, std::string_view origin = "catalog");
  void add_override_table(std::string_view contents, std::string_view origin = "overrides");

  /// Throws EmptyCatalogError when no valid row was accepted.
  SourceCatalog finish(std::string version = {});

 private:
  void add_table(std::string_view contents, std::string_view origin, Provenance provenance);

  const PublicSuffixList* psl_;
  SourceCatalog catalog_;
  std::map<std::string, Provenance, std::less<>> seen_;
};

SourceCatalog load_catalog(const std::filesystem::path& catalog, const PublicSuffixList& psl,
                           const std::optional<std::filesystem::path>& overrides = std::nullopt,
                           std::string version = {});

}  // namespace echoscope
