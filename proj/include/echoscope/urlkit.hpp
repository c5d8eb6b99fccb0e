#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "echoscope/platform.hpp"
#include "echoscope/timeutil.hpp"

namespace echoscope {

struct NormalizedUrl {
  std::string scheme;  // "http" or "https"
  std::string host;    // lowercase ASCII, punycode for IDN labels
  std::string path;    // always starts with '/'
  std::string original;
  bool unexpanded_shortener = false;

  std::string reassemble() const { return scheme + "://" + host + path; }
};

/// One shared URL after normalization and domain reduction.
struct LinkRecord {
  PlatformId platform;
  std::string user_id;
  Timestamp timestamp;
  std::string domain;
  std::optional<PlatformId> target_platform;
  std::optional<std::string> community;

  friend bool operator==(const LinkRecord&, const LinkRecord&) = default;
};

/// Every maximal http(s) URL in `text`, left to right, duplicates kept.
/// Trailing sentence punctuation and unbalanced closing brackets are
/// stripped.
std::vector<std::string> extract_urls(std::string_view text);

/// Maps shortener hosts to their expansion; an empty target marks a known
/// shortener that cannot be expanded offline.
class ShortenerTable {
 public:
  ShortenerTable() = default;
  static ShortenerTable load(const std::filesystem::path& file);
  static ShortenerTable parse(std::string_view contents);

  void add(std::string host, std::string target);
  /// nullopt: not a shortener. Empty string: known but unexpandable.
  std::optional<std::string> lookup(std::string_view host) const;
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::unordered_map<std::string, std::string> table_;
};

/// Canonicalizes a raw URL (or scheme-less host/path). Throws ParseError.
NormalizedUrl normalize_url(std::string_view raw, const ShortenerTable* shorteners = nullptr);

/// RFC 3492 encoding of one label; returns the label unchanged if ASCII.
std::string punycode_label(std::string_view utf8_label);

bool is_ip_literal(std::string_view host);

/// Public-suffix rule set (the publicsuffix.org format, "*" wildcards and
/// "!" exceptions). Registrable-domain queries are pure functions of the host.
class PublicSuffixList {
 public:
  PublicSuffixList() = default;
  static PublicSuffixList load(const std::filesystem::path& file);
  static PublicSuffixList parse(std::string_view contents);

  /// Number of trailing labels forming the public suffix of `host`.
  std::size_t suffix_labels(std::string_view host) const;
  std::string public_suffix(std::string_view host) const;
  /// eTLD+1. Throws DomainResolutionError for IP literals and hosts that
  /// are themselves public suffixes.
  std::string registrable_domain(std::string_view host) const;

  std::size_t rule_count() const noexcept { return rules_.size() + exceptions_.size(); }

 private:
  // Exact rules and wildcard rules are both keyed by their dotted text
  // ("*.ck" stays "*.ck"); exceptions are stored without the '!'.
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> exceptions_;
};

std::string registrable_domain(const NormalizedUrl& url, const PublicSuffixList& psl);

/// Platform-owned domains. Entries may carry a path prefix
/// ("example.com/channel") to claim only part of a domain.
class PlatformAliasTable {
 public:
  PlatformAliasTable() = default;
  static PlatformAliasTable load(const std::filesystem::path& file, PlatformRegistry& registry);
  static PlatformAliasTable parse(std::string_view contents, PlatformRegistry& registry);

  void add(std::string domain, std::string path_prefix, PlatformId platform);
  std::optional<PlatformId> classify(std::string_view domain, std::string_view path = "/") const;

 private:
  struct Entry {
    std::string path_prefix;
    PlatformId platform;
  };
  std::unordered_map<std::string, std::vector<Entry>> table_;
};

inline std::optional<PlatformId> classify_platform_target(const PlatformAliasTable& table,
                                                          std::string_view domain,
                                                          std::string_view path = "/") {
  return table.classify(domain, path);
}

}  // namespace echoscope
