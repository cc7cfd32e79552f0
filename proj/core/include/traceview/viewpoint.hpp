#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "traceview/areas.hpp"
#include "traceview/host_state.hpp"
#include "traceview/schema.hpp"
#include "traceview/time.hpp"

namespace traceview {

enum class Priority { must_see, interesting, facultative };
enum class Attitude { good_news, neutral, bad_news };

std::string_view to_string(Priority p);
std::string_view to_string(Attitude a);
std::optional<Priority> parse_priority(std::string_view text);
std::optional<Attitude> parse_attitude(std::string_view text);

struct FileMeta {
  std::string name;
  std::string path;
  std::string saved_at;  // ISO 8601 UTC seconds, empty until first save
  std::optional<std::string> image;  // relative path, linked not embedded

  friend bool operator==(const FileMeta&, const FileMeta&) = default;
};

struct Period {
  std::string start;  // YYYY-MM-DD
  std::string end;

  friend bool operator==(const Period&, const Period&) = default;
};

struct ContentMeta {
  std::optional<std::string> area_id;
  std::optional<Period> period;
  std::string description;

  friend bool operator==(const ContentMeta&, const ContentMeta&) = default;
};

struct OwnerMeta {
  std::string name;
  Priority priority = Priority::interesting;
  Attitude attitude = Attitude::neutral;

  friend bool operator==(const OwnerMeta&, const OwnerMeta&) = default;
};

/// A saved point of interest: the full state snapshot plus decoration.
struct Viewpoint {
  static constexpr int kFormatVersion = 1;

  FileMeta file;
  ContentMeta content;
  OwnerMeta owner;
  Snapshot snapshot;

  friend bool operator==(const Viewpoint&, const Viewpoint&) = default;
};

/// What the user types into the save window.
struct MetaDraft {
  std::string name;
  std::string description;
  Priority priority = Priority::interesting;
  Attitude attitude = Attitude::neutral;
  std::optional<std::string> area_id;
  std::optional<std::string> image;
  /// Overrides the session identity when set.
  std::optional<std::string> owner;
};

/// TRACEVIEW_USER, else the login of the current session, else "unknown".
std::string session_identity();

Viewpoint capture(const ApplicationState& state, const MetaDraft& draft);

/// Writes the canonical XML atomically and returns the viewpoint as
/// persisted (path and saved-at refreshed).
Viewpoint save_viewpoint(Viewpoint vp, const std::filesystem::path& path,
                         const PreferenceSchema& schema, const Clock& clock);

std::string viewpoint_to_xml(const Viewpoint& vp, const PreferenceSchema& schema);
Viewpoint viewpoint_from_xml(std::string_view document, const PreferenceSchema& schema,
                             const AreaList& areas);
Viewpoint load_viewpoint(const std::filesystem::path& path, const PreferenceSchema& schema,
                         const AreaList& areas);

/// Checks every assignment against the schema (known pref, applicable
/// scope, well-typed canonical value, instance present in the context) and
/// the metadata invariants.
void validate_viewpoint(const Viewpoint& vp, const PreferenceSchema& schema, const AreaList& areas);

struct MetaChanges {
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::optional<Priority> priority;
  std::optional<Attitude> attitude;
  std::optional<std::optional<std::string>> area_id;  // inner nullopt clears
  std::optional<std::optional<std::string>> image;
  std::optional<std::string> owner;
};

/// Returns a copy with metadata changed and assignments untouched.
Viewpoint edit_metadata(const Viewpoint& vp, const MetaChanges& changes, const AreaList& areas);

/// Brings `state` into the configuration captured by `vp`.
void apply(const Viewpoint& vp, ApplicationState& state);

}  // namespace traceview
