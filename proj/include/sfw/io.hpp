#pragma once

// Text output helpers. All floating-point values are printed with %.17g so
// that parsing the text back reproduces the exact double.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sfw {

inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Flat key=value file, one pair per line, written in insertion order.
using ManifestEntries = std::vector<std::pair<std::string, std::string>>;
using ManifestMap = std::map<std::string, std::string>;

inline void write_manifest(const std::string& path, const ManifestEntries& entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
  for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
  if (!out) throw std::runtime_error("write_manifest: write failed for " + path);
}

inline std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_manifest: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("read_manifest: " + path + " line " +
                               std::to_string(line_no) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

inline std::string manifest_get(const std::map<std::string, std::string>& kv,
                                const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("manifest: missing key " + key);
  return it->second;
}

}  // namespace sfw
