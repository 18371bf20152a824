#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pricelab {

// Fixed-point formatting with a '.' separator. The process never calls
// setlocale, so snprintf stays on the C locale and the output is stable
// across environments.
inline std::string format_fixed(double value, int digits = 6) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  if (len < 0 || len >= static_cast<int>(sizeof(buf)))
    throw std::runtime_error("format_fixed: value does not fit");
  return std::string(buf, static_cast<std::size_t>(len));
}

// Staged output directory: every artifact is written to a temp file first and
// renamed into place only after the whole command has produced its outputs.
// A failing command therefore leaves no partial files behind.
class OutputStager {
 public:
  explicit OutputStager(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  OutputStager(const OutputStager&) = delete;
  OutputStager& operator=(const OutputStager&) = delete;

  ~OutputStager() { discard(); }

  void stage(const std::string& filename, const std::string& content) {
    const std::filesystem::path tmp = temp_path(filename);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
    staged_.push_back(filename);
  }

  void commit() {
    for (const std::string& name : staged_)
      std::filesystem::rename(temp_path(name), dir_ / name);
    staged_.clear();
  }

  void discard() noexcept {
    for (const std::string& name : staged_) {
      std::error_code ec;
      std::filesystem::remove(temp_path(name), ec);
    }
    staged_.clear();
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path temp_path(const std::string& name) const {
    return dir_ / (name + ".tmp");
  }

  std::filesystem::path dir_;
  std::vector<std::string> staged_;
};

}  // namespace pricelab
