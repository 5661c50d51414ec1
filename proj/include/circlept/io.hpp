#pragma once

// Output directories, atomic file commits and run manifests.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace circlept {

/// Writes `content` to a sibling temporary file, then renames it onto `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Calls `writer(tmp)` and renames the temporary file onto `path`.
void commit_file(const std::string& path, const std::function<void(const std::string&)>& writer);

std::string read_file(const std::string& path);

/// Explicit root if non-empty, else $CIRCLEPT_OUT, else "circlept_out".
std::string output_root(const std::string& explicit_root);

/// 64-bit FNV-1a of `text` as 16 hex digits.
std::string content_hash(const std::string& text);

void ensure_directory(const std::string& dir);

struct Manifest {
  std::string command;
  std::string config_json;  // serialized RunConfig
  std::vector<std::uint64_t> seeds;
  int threads = 1;
  std::vector<std::string> files;
};

/// manifest.json: command, code version, config, seeds, thread budget and file list. No timestamps,
/// so reruns of the same config produce identical bytes.
void write_manifest(const std::string& dir, const Manifest& m);

}  // namespace circlept
