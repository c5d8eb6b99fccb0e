#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "echoscope/error.hpp"
#include "echoscope/text.hpp"
#include "echoscope/urlkit.hpp"

using namespace echoscope;

namespace {

const PublicSuffixList& psl() {
  static const PublicSuffixList list = PublicSuffixList::load(ECHOSCOPE_DATA_DIR "/public_suffix_list.dat");
  return list;
}

}  // namespace

TEST_CASE("extract_urls basics") {
  CHECK(extract_urls("see https://cnn.com/a and http://foxnews.com") ==
        std::vector<std::string>{"https://cnn.com/a", "http://foxnews.com"});
  CHECK(extract_urls("no links here").empty());
  CHECK(extract_urls("").empty());
}

TEST_CASE("extract_urls matches the hand-labeled fixture") {
  std::ifstream in(ECHOSCOPE_FIXTURE_DIR "/url_extraction.tsv");
  REQUIRE(in);
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const std::string input = line.substr(0, tab);
    std::vector<std::string> expected;
    std::istringstream ws(line.substr(tab + 1));
    for (std::string u; ws >> u;) expected.push_back(u);
    INFO("input: " << input);
    CHECK(extract_urls(input) == expected);
    ++cases;
  }
  CHECK(cases == 50);
}

TEST_CASE("normalize_url canonicalizes") {
  auto u = normalize_url("HTTPS://WWW.NYTimes.com:443/2020/x#frag");
  CHECK(u.host == "nytimes.com");
  CHECK(u.path == "/2020/x");
  CHECK(u.scheme == "https");

  auto short_link = normalize_url("youtu.be/abc");
  CHECK(short_link.host == "youtu.be");
  CHECK(short_link.path == "/abc");
  CHECK(short_link.scheme == "http");

  CHECK_THROWS_AS(normalize_url("not a url"), ParseError);
  CHECK_THROWS_AS(normalize_url("ftp://files.example.com/x"), ParseError);
  CHECK_THROWS_AS(normalize_url(""), ParseError);

  auto creds = normalize_url("http://user:pw@Example.ORG:8080/p?q=1");
  CHECK(creds.host == "example.org");
  CHECK(creds.path == "/p");
  // "www." is kept when stripping it would leave a dotless host
  CHECK(normalize_url("https://www.com/").host == "www.com");
  CHECK(normalize_url("https://www.cnn.com/").host == "cnn.com");
  CHECK(normalize_url("http://cnn.com").path == "/");
}

TEST_CASE("normalize_url is idempotent on its own output") {
  for (const char* raw : {"HTTPS://WWW.NYTimes.com:443/2020/x#frag", "youtu.be/abc", "http://a.b.example.co.uk/x/y",
                          "https://bücher.de/katalog"}) {
    auto once = normalize_url(raw);
    auto twice = normalize_url(once.reassemble());
    CHECK(twice.host == once.host);
    CHECK(twice.path == once.path);
  }
}

TEST_CASE("IDN hosts become punycode") {
  CHECK(punycode_label("bücher") == "xn--bcher-kva");
  CHECK(punycode_label("münchen") == "xn--mnchen-3ya");
  CHECK(punycode_label("plain") == "plain");
  CHECK(normalize_url("https://Bücher.de/").host == "xn--bcher-kva.de");
}

TEST_CASE("shortener expansion uses the static table only") {
  auto table = ShortenerTable::parse("fxn.ws\tfoxnews.com\nbit.ly\t-\n");
  auto expanded = normalize_url("https://fxn.ws/abc", &table);
  CHECK(expanded.host == "foxnews.com");
  CHECK_FALSE(expanded.unexpanded_shortener);
  auto opaque = normalize_url("https://bit.ly/xyz", &table);
  CHECK(opaque.host == "bit.ly");
  CHECK(opaque.unexpanded_shortener);
  CHECK(normalize_url("https://cnn.com/", &table).host == "cnn.com");
}

TEST_CASE("registrable_domain") {
  CHECK(psl().registrable_domain("news.bbc.co.uk") == "bbc.co.uk");
  CHECK(psl().registrable_domain("nytimes.com") == "nytimes.com");
  CHECK_THROWS_AS(psl().registrable_domain("co.uk"), DomainResolutionError);
  CHECK_THROWS_AS(psl().registrable_domain("192.168.1.1"), DomainResolutionError);
  CHECK_THROWS_AS(psl().registrable_domain("[::1]"), DomainResolutionError);
  CHECK(registrable_domain(normalize_url("https://www.bbc.co.uk/news"), psl()) == "bbc.co.uk");
}

TEST_CASE("registrable_domain agrees with the brute-force oracle on 200 hosts") {
  std::ifstream in(ECHOSCOPE_FIXTURE_DIR "/psl_oracle.tsv");
  REQUIRE(in);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    REQUIRE(tab != std::string::npos);
    const auto host = line.substr(0, tab), expected = line.substr(tab + 1);
    INFO("host: " << host);
    if (expected == "ERROR") {
      CHECK_THROWS_AS(psl().registrable_domain(host), DomainResolutionError);
    } else {
      CHECK(psl().registrable_domain(host) == expected);
    }
    ++n;
  }
  CHECK(n == 200);
}

TEST_CASE("registrable_domain is idempotent over random hosts") {
  std::mt19937 rng(11);
  const std::vector<std::string> tails = {"com", "co.uk", "org", "github.io", "kawasaki.jp", "ck", "zzz", "com.au"};
  std::uniform_int_distribution<int> len(1, 6), ch(0, 25), depth(1, 3);
  for (int trial = 0; trial < 500; ++trial) {
    std::string host = tails[rng() % tails.size()];
    for (int d = depth(rng); d > 0; --d) {
      std::string label;
      for (int k = len(rng); k > 0; --k) label.push_back(static_cast<char>('a' + ch(rng)));
      host = label + "." + host;
    }
    std::string once;
    try {
      once = psl().registrable_domain(host);
    } catch (const DomainResolutionError&) {
      continue;
    }
    CHECK(psl().registrable_domain(once) == once);
    CHECK(host.size() >= once.size());
  }
}

TEST_CASE("platform alias classification") {
  auto reg = PlatformRegistry::defaults();
  auto aliases = PlatformAliasTable::load(ECHOSCOPE_DATA_DIR "/platform_domains.txt", reg);
  CHECK(aliases.classify("youtu.be") == PlatformId("YouTube"));
  CHECK(aliases.classify("communities.win") == PlatformId("Scored"));
  CHECK(aliases.classify("scored.co") == PlatformId("Scored"));
  CHECK(aliases.classify("t.co") == PlatformId("Twitter"));
  CHECK_FALSE(aliases.classify("cnn.com"));
  CHECK_FALSE(aliases.classify("patriots.win"));  // external news domain by default
  CHECK(classify_platform_target(aliases, "gab.com", "/") == PlatformId("Gab"));

  PlatformAliasTable scoped;
  scoped.add("example.com", "/forum", PlatformId("Forum"));
  CHECK(scoped.classify("example.com", "/forum/t/1") == PlatformId("Forum"));
  CHECK_FALSE(scoped.classify("example.com", "/news"));
}
