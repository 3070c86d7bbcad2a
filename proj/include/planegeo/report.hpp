#pragma once

// Deterministic key-ordered text reports: identical inputs and seeds must
// produce byte-identical output, so all floating-point values go through one
// fixed formatter and keys are emitted in insertion order chosen by the
// caller (callers insert in sorted order).

#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace planegeo {

inline const char* tool_version() { return "planegeo 1.0.0"; }

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Report {
 public:
  explicit Report(const std::string& title) {
    lines_.push_back("report: " + title);
    lines_.push_back("version: " + std::string(tool_version()));
  }

  void add(const std::string& key, const std::string& value) {
    lines_.push_back(key + ": " + value);
  }
  void add(const std::string& key, double v) { add(key, format_double(v)); }
  void add(const std::string& key, long v) { add(key, std::to_string(v)); }
  void add(const std::string& key, int v) { add(key, std::to_string(v)); }
  void add(const std::string& key, bool v) { add(key, std::string(v ? "true" : "false")); }
  void add(const std::string& key, unsigned long long v) { add(key, std::to_string(v)); }

  void add_vector(const std::string& key, const std::vector<double>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    add(key, s + "]");
  }

  std::string str() const {
    std::string out;
    for (const auto& l : lines_) out += l + "\n";
    return out;
  }

 private:
  std::vector<std::string> lines_;
};

}  // namespace planegeo
