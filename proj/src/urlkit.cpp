#include "echoscope/urlkit.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "echoscope/error.hpp"
#include "echoscope/text.hpp"

namespace echoscope {

namespace {

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool url_char(unsigned char c) {
  if (c <= 0x20 || c == 0x7f) return false;
  return c != '<' && c != '>' && c != '"' && c != '\'' && c != '`';
}

std::size_t count_char(std::string_view s, char c) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), c));
}

std::string_view strip_trailing(std::string_view u) {
  while (!u.empty()) {
    char last = u.back();
    if (last == '.' || last == ',' || last == ';' || last == ':' || last == '!' || last == '?') {
      u.remove_suffix(1);
      continue;
    }
    char open = last == ')' ? '(' : last == ']' ? '[' : last == '}' ? '{' : '\0';
    if (open != '\0' && count_char(u, open) < count_char(u, last)) {
      u.remove_suffix(1);
      continue;
    }
    break;
  }
  return u;
}

// Decodes UTF-8 into code points; returns false on malformed input.
bool utf8_decode(std::string_view s, std::vector<std::uint32_t>& out) {
  out.clear();
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xe0) == 0xc0) {
      cp = c & 0x1f;
      extra = 1;
    } else if ((c & 0xf0) == 0xe0) {
      cp = c & 0x0f;
      extra = 2;
    } else if ((c & 0xf8) == 0xf0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      return false;
    }
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= s.size()) return false;
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return true;
}

char punycode_digit(std::uint32_t d) {
  return static_cast<char>(d < 26 ? 'a' + d : '0' + (d - 26));
}

std::uint32_t punycode_adapt(std::uint32_t delta, std::uint32_t numpoints, bool first) {
  constexpr std::uint32_t base = 36, tmin = 1, tmax = 26, skew = 38, damp = 700;
  delta = first ? delta / damp : delta / 2;
  delta += delta / numpoints;
  std::uint32_t k = 0;
  while (delta > ((base - tmin) * tmax) / 2) {
    delta /= base - tmin;
    k += base;
  }
  return k + (((base - tmin + 1) * delta) / (delta + skew));
}

bool valid_host_label(std::string_view label) {
  if (label.empty() || label.size() > 63) return false;
  for (char c : label) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::vector<std::pair<std::string, std::string>> parse_tab_table(std::string_view contents) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string_view::npos) throw ConfigError("table line without a tab: " + std::string(t));
    rows.emplace_back(std::string(text::trim(t.substr(0, tab))),
                      std::string(text::trim(t.substr(tab + 1))));
  }
  return rows;
}

}  // namespace

std::vector<std::string> extract_urls(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = std::string::npos;
    std::size_t scheme_len = 0;
    for (std::size_t j = i; j + 7 <= text.size(); ++j) {
      if (text::starts_with_icase(text.substr(j), "http://")) {
        start = j;
        scheme_len = 7;
        break;
      }
      if (text::starts_with_icase(text.substr(j), "https://")) {
        start = j;
        scheme_len = 8;
        break;
      }
    }
    if (start == std::string::npos) break;
    std::size_t end = start;
    while (end < text.size() && url_char(static_cast<unsigned char>(text[end]))) ++end;
    auto url = strip_trailing(text.substr(start, end - start));
    if (url.size() > scheme_len) out.emplace_back(url);
    i = std::max(end, start + 1);
  }
  return out;
}

ShortenerTable ShortenerTable::load(const std::filesystem::path& file) {
  return parse(read_file(file));
}

ShortenerTable ShortenerTable::parse(std::string_view contents) {
  ShortenerTable t;
  for (auto& [host, target] : parse_tab_table(contents)) {
    t.add(text::to_lower(host), target == "-" ? std::string() : text::to_lower(target));
  }
  return t;
}

void ShortenerTable::add(std::string host, std::string target) {
  table_.emplace(std::move(host), std::move(target));
}

std::optional<std::string> ShortenerTable::lookup(std::string_view host) const {
  auto it = table_.find(std::string(host));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::string punycode_label(std::string_view utf8_label) {
  std::vector<std::uint32_t> cps;
  if (!utf8_decode(utf8_label, cps)) throw ParseError("invalid UTF-8 in host label");
  if (std::all_of(cps.begin(), cps.end(), [](std::uint32_t c) { return c < 0x80; }))
    return std::string(utf8_label);

  constexpr std::uint32_t base = 36, tmin = 1, tmax = 26;
  std::string out;
  for (auto c : cps) {
    if (c < 0x80) out.push_back(static_cast<char>(c));
  }
  const auto basic = static_cast<std::uint32_t>(out.size());
  std::uint32_t handled = basic;
  if (basic > 0) out.push_back('-');

  std::uint32_t n = 128, delta = 0, bias = 72;
  while (handled < cps.size()) {
    std::uint32_t m = UINT32_MAX;
    for (auto c : cps) {
      if (c >= n && c < m) m = c;
    }
    delta += (m - n) * (handled + 1);
    n = m;
    for (auto c : cps) {
      if (c < n) ++delta;
      if (c == n) {
        std::uint32_t q = delta;
        for (std::uint32_t k = base;; k += base) {
          std::uint32_t t = k <= bias ? tmin : (k >= bias + tmax ? tmax : k - bias);
          if (q < t) break;
          out.push_back(punycode_digit(t + (q - t) % (base - t)));
          q = (q - t) / (base - t);
        }
        out.push_back(punycode_digit(q));
        bias = punycode_adapt(delta, handled + 1, handled == basic);
        delta = 0;
        ++handled;
      }
    }
    ++delta;
    ++n;
  }
  return "xn--" + out;
}

bool is_ip_literal(std::string_view host) {
  if (!host.empty() && host.front() == '[') return true;
  auto parts = text::split(host, '.');
  if (parts.size() != 4) return false;
  for (const auto& p : parts) {
    if (p.empty() || p.size() > 3) return false;
    if (!std::all_of(p.begin(), p.end(), [](char c) { return c >= '0' && c <= '9'; })) return false;
  }
  return true;
}

NormalizedUrl normalize_url(std::string_view raw, const ShortenerTable* shorteners) {
  NormalizedUrl url;
  url.original = std::string(raw);
  auto s = text::trim(raw);
  if (s.empty()) throw ParseError("empty URL");

  std::string_view rest = s;
  url.scheme = "http";
  auto sep = s.find("://");
  if (sep != std::string_view::npos) {
    auto scheme = s.substr(0, sep);
    bool scheme_ok = !scheme.empty() &&
                     ((scheme[0] >= 'a' && scheme[0] <= 'z') || (scheme[0] >= 'A' && scheme[0] <= 'Z'));
    for (char c : scheme) {
      bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                c == '+' || c == '.' || c == '-';
      scheme_ok = scheme_ok && ok;
    }
    if (scheme_ok) {
      url.scheme = text::to_lower(scheme);
      if (url.scheme != "http" && url.scheme != "https")
        throw ParseError("unsupported scheme: " + url.scheme);
      rest = s.substr(sep + 3);
    }
  }

  auto auth_end = rest.find_first_of("/?#");
  auto authority = rest.substr(0, auth_end);
  std::string_view tail = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);

  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);

  std::string host;
  if (!authority.empty() && authority.front() == '[') {
    if (authority.back() != ']' && authority.find("]:") == std::string_view::npos)
      throw ParseError("unterminated IPv6 literal");
    host = text::to_lower(authority.substr(0, authority.find(']') + 1));
  } else {
    if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
      auto port = authority.substr(colon + 1);
      if (!std::all_of(port.begin(), port.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ParseError("invalid port");
      authority = authority.substr(0, colon);
    }
    std::string lowered = text::to_lower(authority);
    while (!lowered.empty() && lowered.back() == '.') lowered.pop_back();
    if (lowered.empty()) throw ParseError("empty host");
    auto labels = text::split(lowered, '.');
    if (labels.size() < 2) throw ParseError("host has no dot: " + lowered);
    for (auto& label : labels) {
      label = punycode_label(label);
      if (!valid_host_label(label)) throw ParseError("invalid host: " + lowered);
    }
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (k) host.push_back('.');
      host += labels[k];
    }
    if (host.size() > 253) throw ParseError("host too long");
    if (host.rfind("www.", 0) == 0 && host.find('.', 4) != std::string::npos) host.erase(0, 4);
    if (shorteners) {
      if (auto target = shorteners->lookup(host)) {
        if (target->empty()) {
          url.unexpanded_shortener = true;
        } else {
          host = *target;
        }
      }
    }
  }
  url.host = std::move(host);

  auto path_end = tail.find_first_of("?#");
  auto path = tail.substr(0, path_end);
  url.path = path.empty() ? "/" : std::string(path);
  return url;
}

PublicSuffixList PublicSuffixList::load(const std::filesystem::path& file) {
  return parse(read_file(file));
}

PublicSuffixList PublicSuffixList::parse(std::string_view contents) {
  PublicSuffixList psl;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.substr(0, 2) == "//") continue;
    auto sp = t.find_first_of(" \t");
    auto rule = text::to_lower(t.substr(0, sp));
    if (rule.front() == '!') {
      psl.exceptions_.insert(rule.substr(1));
    } else {
      psl.rules_.insert(rule);
    }
  }
  return psl;
}

std::size_t PublicSuffixList::suffix_labels(std::string_view host) const {
  auto labels = text::split(host, '.');
  const std::size_t n = labels.size();
  // Walk candidate suffixes from longest to shortest; the first hit is the
  // longest matching rule. Exceptions override and shorten by one label.
  std::string candidate;
  std::size_t best = 0;
  for (std::size_t len = n; len >= 1; --len) {
    candidate.clear();
    for (std::size_t k = n - len; k < n; ++k) {
      if (!candidate.empty()) candidate.push_back('.');
      candidate += labels[k];
    }
    if (exceptions_.count(candidate)) return len - 1;
    if (best == 0) {
      if (rules_.count(candidate)) {
        best = len;
      } else if (len >= 2) {
        auto wildcard = "*" + candidate.substr(labels[n - len].size());
        if (rules_.count(wildcard)) best = len;
      }
    }
  }
  return best == 0 ? 1 : best;
}

std::string PublicSuffixList::public_suffix(std::string_view host) const {
  auto labels = text::split(host, '.');
  auto k = std::min(suffix_labels(host), labels.size());
  std::string out;
  for (std::size_t i = labels.size() - k; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels[i];
  }
  return out;
}

std::string PublicSuffixList::registrable_domain(std::string_view host) const {
  if (host.empty()) throw DomainResolutionError("empty host");
  if (is_ip_literal(host)) throw DomainResolutionError("IP literal host: " + std::string(host));
  auto labels = text::split(host, '.');
  auto k = suffix_labels(host);
  if (labels.size() <= k) throw DomainResolutionError("host is a public suffix: " + std::string(host));
  std::string out;
  for (std::size_t i = labels.size() - k - 1; i < labels.size(); ++i) {
    if (!out.empty()) out.push_back('.');
    out += labels[i];
  }
  return out;
}

std::string registrable_domain(const NormalizedUrl& url, const PublicSuffixList& psl) {
  return psl.registrable_domain(url.host);
}

PlatformAliasTable PlatformAliasTable::load(const std::filesystem::path& file,
                                            PlatformRegistry& registry) {
  return parse(read_file(file), registry);
}

PlatformAliasTable PlatformAliasTable::parse(std::string_view contents, PlatformRegistry& registry) {
  PlatformAliasTable t;
  for (auto& [key, platform] : parse_tab_table(contents)) {
    auto slash = key.find('/');
    std::string domain = text::to_lower(key.substr(0, slash));
    std::string prefix = slash == std::string::npos ? std::string() : key.substr(slash);
    t.add(std::move(domain), std::move(prefix), registry.add(platform));
  }
  return t;
}

void PlatformAliasTable::add(std::string domain, std::string path_prefix, PlatformId platform) {
  auto& entries = table_[std::move(domain)];
  entries.push_back({std::move(path_prefix), std::move(platform)});
  // Longest prefix first so the most specific entry wins.
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.path_prefix.size() > b.path_prefix.size();
  });
}

std::optional<PlatformId> PlatformAliasTable::classify(std::string_view domain,
                                                       std::string_view path) const {
  auto it = table_.find(std::string(domain));
  if (it == table_.end()) return std::nullopt;
  for (const auto& e : it->second) {
    if (e.path_prefix.empty() || path.substr(0, e.path_prefix.size()) == e.path_prefix)
      return e.platform;
  }
  return std::nullopt;
}

}  // namespace echoscope
