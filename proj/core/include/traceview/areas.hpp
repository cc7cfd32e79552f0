#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace traceview {

struct Area {
  std::string id;
  std::string name;
  std::string icon;

  friend bool operator==(const Area&, const Area&) = default;
};

/// Preloaded list of geographic areas a viewpoint may be tagged with.
class AreaList {
 public:
  AreaList() = default;
  explicit AreaList(std::vector<Area> areas);

  const Area* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  const std::vector<Area>& areas() const { return areas_; }

 private:
  std::vector<Area> areas_;  // sorted by id
};

/// CSV with header id,name,icon.
AreaList load_area_list(const std::filesystem::path& path);
AreaList parse_area_list(std::string_view csv_text);
/// ISO-3166 alpha-2 codes plus "world".
std::string_view default_area_document();
const AreaList& default_area_list();

}  // namespace traceview
