#include <algorithm>
#include <set>

#include "traceview/csv.hpp"
#include "traceview/error.hpp"
#include "traceview/host_state.hpp"
#include "traceview/text.hpp"

namespace traceview {

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::text: return "text";
    case ColumnKind::temporal: return "temporal";
  }
  return "?";
}

const Column* Relation::find_column(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

std::optional<std::size_t> Relation::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return i;
  }
  return std::nullopt;
}

Relation read_relation(const std::filesystem::path& csv_path, std::string name,
                       std::optional<std::string> time_column) {
  auto records = csv::read_file(csv_path);
  const std::string where = csv_path.string() + ": ";
  if (records.empty()) throw ParseError(where + "no header");

  Relation r;
  r.name = std::move(name);
  r.source = csv_path.string();
  std::set<std::string> seen;
  for (const auto& h : records[0]) {
    if (h.empty()) throw ParseError(where + "empty column name in header");
    if (!seen.insert(h).second) throw ParseError(where + "duplicate column '" + h + "'");
    r.columns.push_back({h, ColumnKind::text});
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != r.columns.size()) {
      throw ParseError(where + "ragged row " + std::to_string(i + 1) + " has " +
                       std::to_string(records[i].size()) + " fields, expected " +
                       std::to_string(r.columns.size()));
    }
    r.rows.push_back(std::move(records[i]));
  }

  auto column_all = [&](std::size_t c, auto&& pred) {
    return std::all_of(r.rows.begin(), r.rows.end(), [&](const auto& row) { return pred(row[c]); });
  };
  auto is_number = [](const std::string& s) { return parse_decimal(s).has_value(); };
  auto is_date = [](const std::string& s) { return parse_iso_date(s).has_value(); };

  for (std::size_t c = 0; c < r.columns.size(); ++c) {
    auto& col = r.columns[c];
    if (r.rows.empty()) continue;
    if (time_column && col.name == *time_column) {
      if (!column_all(c, is_date)) {
        throw ValidationError(where + "time column '" + col.name + "' holds values that are not ISO dates");
      }
      col.kind = ColumnKind::temporal;
    } else if (column_all(c, is_number)) {
      col.kind = ColumnKind::numeric;
    } else if (column_all(c, is_date)) {
      col.kind = ColumnKind::temporal;
    }
  }
  if (time_column) {
    const auto* col = r.find_column(*time_column);
    if (!col) throw ValidationError(where + "time column '" + *time_column + "' does not exist");
    if (!r.rows.empty() && col->kind != ColumnKind::temporal) {
      throw ValidationError(where + "time column '" + *time_column + "' is not temporal");
    }
    r.time_column = std::move(time_column);
  }
  return r;
}

}  // namespace traceview
