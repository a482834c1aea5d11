#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace bnp::cli {

/// Bad flag values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_real_list(const std::string& text, const std::string& flag);
std::vector<std::uint64_t> parse_count_list(const std::string& text, const std::string& flag);
std::vector<std::string> parse_word_list(const std::string& text);

/// Locale-independent shortest round-trip form.
std::string num(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Collects what a command read and wrote; write() emits manifest.json last.
class RunRecorder {
 public:
  RunRecorder(std::string command, std::filesystem::path out_dir, bool force);

  [[nodiscard]] const std::filesystem::path& out_dir() const { return out_dir_; }
  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const std::filesystem::path& path);
  /// Path of a new output file inside the output directory.
  std::filesystem::path output(const std::string& name);
  void write() const;

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  nlohmann::json config_;
  std::uint64_t seed_ = 0;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace bnp::cli
