#include "traceview/areas.hpp"

#include <algorithm>

#include "traceview/csv.hpp"
#include "traceview/error.hpp"
#include "traceview/io.hpp"

namespace traceview {

AreaList::AreaList(std::vector<Area> areas) : areas_(std::move(areas)) {
  std::sort(areas_.begin(), areas_.end(), [](const Area& a, const Area& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < areas_.size(); ++i) {
    if (areas_[i].id == areas_[i - 1].id) throw ValidationError("duplicate area id '" + areas_[i].id + "'");
  }
}

const Area* AreaList::find(std::string_view id) const {
  auto it = std::lower_bound(areas_.begin(), areas_.end(), id,
                             [](const Area& a, std::string_view key) { return a.id < key; });
  return it != areas_.end() && it->id == id ? &*it : nullptr;
}

AreaList parse_area_list(std::string_view csv_text) {
  auto records = csv::parse(csv_text);
  if (records.empty() || records[0] != csv::Record{"id", "name", "icon"}) {
    throw ValidationError("area list: expected header id,name,icon");
  }
  std::vector<Area> areas;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.size() != 3 || r[0].empty()) {
      throw ValidationError("area list: malformed row " + std::to_string(i + 1));
    }
    areas.push_back({r[0], r[1], r[2]});
  }
  return AreaList(std::move(areas));
}

AreaList load_area_list(const std::filesystem::path& path) { return parse_area_list(read_file(path)); }

const AreaList& default_area_list() {
  static const AreaList list = parse_area_list(default_area_document());
  return list;
}

}  // namespace traceview
