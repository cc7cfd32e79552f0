#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "traceview/time.hpp"
#include "traceview/workspace.hpp"

namespace traceview {

inline constexpr int kDefaultPort = 7341;

/// HTTP JSON service over one workspace. Holds a single exploration
/// session; session changes and file writes are serialized, reads run
/// concurrently.
///
///   GET  /viewpoints              summaries
///   GET  /viewpoints/{id}         full viewpoint, ETag = saved-at
///   PUT  /viewpoints/{id}         metadata edit, If-Match saved-at
///   POST /diff                    {left, right[, top]}
///   POST /layout                  {ids[, label]}
///   GET  /scenarios               summaries
///   GET  /scenarios/{id}          steps and preview, ETag = content hash
///   POST /scenarios               {name, refs[, id]}
///   PUT  /scenarios/{id}          {steps} or {op: insert|move|remove, ...}, If-Match
///   POST /scenarios/{id}/goto     {step}
///   GET  /session                 state summary
///
/// Ids are workspace-relative paths, percent-encoded in the URL.
class Service {
 public:
  explicit Service(Workspace workspace, Clock clock = clock_from_environment());
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Serves the files under `dir` at "/" (the UI bundle).
  void mount_static(const std::filesystem::path& dir);

  /// Binds to `host:port`; port 0 picks a free one. Returns the bound port.
  /// Throws IoError.
  int bind(const std::string& host, int port);
  /// Handles requests until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace traceview
