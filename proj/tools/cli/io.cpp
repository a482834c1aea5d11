#include "io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "bnp/corpus.hpp"

namespace bnp::cli {

namespace fs = std::filesystem;

std::vector<std::string> parse_word_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string::npos ? text.size() : comma;
    std::string item = text.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& item : parse_word_list(text)) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size()) {
      throw UsageError(fmt::format("{}: '{}' is not a number", flag, item));
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": expected at least one value");
  return out;
}

std::vector<std::uint64_t> parse_count_list(const std::string& text, const std::string& flag) {
  std::vector<std::uint64_t> out;
  for (const auto& item : parse_word_list(text)) {
    double v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size() || v < 1 || v != std::floor(v) || v > 1e15) {
      throw UsageError(fmt::format("{}: '{}' is not a positive integer", flag, item));
    }
    out.push_back(static_cast<std::uint64_t>(v));
  }
  if (out.empty()) throw UsageError(flag + ": expected at least one value");
  return out;
}

std::string num(double x) { return fmt::format("{}", x); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

RunRecorder::RunRecorder(std::string command, fs::path out_dir, bool force)
    : command_(std::move(command)), out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {
  if (out_dir_.empty()) throw UsageError("--out is required");
  const auto manifest = out_dir_ / "manifest.json";
  if (fs::exists(manifest)) {
    if (!force) throw std::runtime_error(manifest.string() + " exists; pass --force to overwrite");
    fs::remove(manifest);
  }
  fs::create_directories(out_dir_);
}

void RunRecorder::add_input(const fs::path& path) { inputs_.emplace_back(path.string(), file_sha256(path)); }

fs::path RunRecorder::output(const std::string& name) {
  outputs_.push_back(name);
  return out_dir_ / name;
}

void RunRecorder::write() const {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [path, hash] : inputs_) inputs[path] = hash;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  const nlohmann::json manifest{{"command", command_},
                                {"tool_version", BNP_VERSION},
                                {"master_seed", seed_},
                                {"config", config_},
                                {"inputs", inputs},
                                {"outputs", outputs_},
                                {"wall_clock_seconds", seconds}};
  write_json(out_dir_ / "manifest.json", manifest);
}

}  // namespace bnp::cli
