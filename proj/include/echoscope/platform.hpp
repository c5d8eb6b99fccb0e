#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace echoscope {

/// Identifier of an analyzed platform. Platforms form an open,
/// string-keyed registry; the nine platforms of the 2020 study are only
/// the default contents.
class PlatformId {
 public:
  PlatformId() = default;
  explicit PlatformId(std::string name) : name_(std::move(name)) {}

  const std::string& str() const noexcept { return name_; }
  bool empty() const noexcept { return name_.empty(); }

  friend bool operator==(const PlatformId&, const PlatformId&) = default;
  friend auto operator<=>(const PlatformId&, const PlatformId&) = default;

 private:
  std::string name_;
};

/// Ordered set of known platforms. Lookup is case-insensitive and always
/// returns the canonical spelling that was registered first.
class PlatformRegistry {
 public:
  PlatformRegistry() = default;
  explicit PlatformRegistry(const std::vector<std::string>& names);

  static PlatformRegistry defaults();

  const PlatformId& add(std::string_view name);
  std::optional<PlatformId> find(std::string_view name) const;
  bool contains(const PlatformId& id) const;
  std::optional<std::size_t> index_of(const PlatformId& id) const;

  const std::vector<PlatformId>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }

 private:
  std::vector<PlatformId> ids_;
};

}  // namespace echoscope

template <>
struct std::hash<echoscope::PlatformId> {
  std::size_t operator()(const echoscope::PlatformId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
