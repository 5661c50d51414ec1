#include "circlept/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "circlept/types.hpp"

namespace circlept {

namespace fs = std::filesystem;

namespace {

std::string temp_name(const std::string& path) { return path + ".tmp"; }

}  // namespace

void commit_file(const std::string& path, const std::function<void(const std::string&)>& writer) {
  const std::string tmp = temp_name(path);
  try {
    writer(tmp);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "rename " + tmp + " -> " + path + ": " + ec.message());
}

void write_file_atomic(const std::string& path, const std::string& content) {
  commit_file(path, [&](const std::string& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp);
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp);
  });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string output_root(const std::string& explicit_root) {
  if (!explicit_root.empty()) return explicit_root;
  if (const char* env = std::getenv("CIRCLEPT_OUT"); env && *env) return env;
  return "circlept_out";
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
}

void write_manifest(const std::string& dir, const Manifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["version"] = CIRCLEPT_VERSION;
  j["config"] = nlohmann::json::parse(m.config_json);
  j["seeds"] = m.seeds;
  j["threads"] = m.threads;
  std::vector<std::string> files = m.files;
  std::sort(files.begin(), files.end());
  j["files"] = files;
  write_file_atomic((fs::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace circlept
