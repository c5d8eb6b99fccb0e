#include "echoscope/platform.hpp"

#include "echoscope/text.hpp"

namespace echoscope {

PlatformRegistry::PlatformRegistry(const std::vector<std::string>& names) {
  for (const auto& n : names) add(n);
}

PlatformRegistry PlatformRegistry::defaults() {
  return PlatformRegistry({"Facebook", "Reddit", "Twitter", "YouTube", "BitChute",
                           "Gab", "Parler", "Scored", "Voat"});
}

const PlatformId& PlatformRegistry::add(std::string_view name) {
  for (const auto& id : ids_) {
    if (text::iequals(id.str(), name)) return id;
  }
  ids_.emplace_back(std::string(name));
  return ids_.back();
}

std::optional<PlatformId> PlatformRegistry::find(std::string_view name) const {
  for (const auto& id : ids_) {
    if (text::iequals(id.str(), name)) return id;
  }
  return std::nullopt;
}

bool PlatformRegistry::contains(const PlatformId& id) const {
  return index_of(id).has_value();
}

std::optional<std::size_t> PlatformRegistry::index_of(const PlatformId& id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == id) return i;
  }
  return std::nullopt;
}

}  // namespace echoscope
