#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnp/random.hpp"

namespace bnp {

enum class ProcessKind { Dirichlet, PitmanYor, Uniform };

std::string_view to_string(ProcessKind kind);
/// Accepts "dp"/"dirichlet", "py"/"pitman-yor", "up"/"uniform".
ProcessKind parse_process_kind(std::string_view name);
/// Short tag used in CSV/JSON output: "dp", "py" or "up".
std::string_view short_name(ProcessKind kind);

/// Clustering prior: process kind, concentration theta > 0 and, for
/// Pitman-Yor, discount 0 <= alpha < 1.
class PriorSpec {
 public:
  PriorSpec(ProcessKind kind, double theta, double alpha = 0.0);

  static PriorSpec dirichlet(double theta) { return {ProcessKind::Dirichlet, theta}; }
  static PriorSpec pitman_yor(double theta, double alpha) { return {ProcessKind::PitmanYor, theta, alpha}; }
  static PriorSpec uniform(double theta) { return {ProcessKind::Uniform, theta}; }

  [[nodiscard]] ProcessKind kind() const noexcept { return kind_; }
  [[nodiscard]] double theta() const noexcept { return theta_; }
  /// Always 0 unless kind() == PitmanYor.
  [[nodiscard]] double alpha() const noexcept { return alpha_; }

  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;

 private:
  ProcessKind kind_;
  double theta_;
  double alpha_;
};

using Label = std::uint32_t;

/// Ordered cluster assignments under canonical labeling: labels are 0-based
/// and label k first appears before label k + 1. Sizes and K are derived and
/// kept consistent with the assignment sequence.
class Partition {
 public:
  Partition() = default;

  /// Relabels arbitrary labels into canonical first-occurrence order.
  static Partition from_labels(std::span<const Label> labels);
  static Partition from_labels(std::initializer_list<Label> labels) {
    return from_labels(std::span<const Label>(labels.begin(), labels.size()));
  }

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return labels_.empty(); }
  [[nodiscard]] std::size_t num_clusters() const noexcept { return sizes_.size(); }
  [[nodiscard]] std::span<const Label> labels() const noexcept { return labels_; }
  [[nodiscard]] std::span<const std::uint32_t> sizes() const noexcept { return sizes_; }
  [[nodiscard]] Label operator[](std::size_t i) const { return labels_[i]; }

  /// Appends one observation. `label` must be an existing label or
  /// num_clusters() (a new cluster); anything else throws.
  void append(Label label);
  void reserve(std::size_t n) { labels_.reserve(n); }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Label> labels_;
  std::vector<std::uint32_t> sizes_;
};

/// Log predictive probabilities of the next assignment: entries 0..K-1 join
/// existing clusters, entry K opens a new cluster.
std::vector<double> predictive_log_probs(const PriorSpec& spec, const Partition& partition);

/// Draws the next label from the predictive rule (O(1) for all three
/// processes).
Label draw_next_label(const PriorSpec& spec, const Partition& partition, RandomStream& rng);

Partition sample_next(const PriorSpec& spec, const Partition& partition, RandomStream& rng);

/// n sequential draws from the empty partition. Requires n >= 1.
Partition sample_partition(const PriorSpec& spec, std::size_t n, RandomStream& rng);

/// Sum over positions of log P(c_n | c_<n) for the stored ordering.
double log_joint(const PriorSpec& spec, const Partition& partition);

/// Result position i takes the assignment at position perm[i], then labels
/// are made canonical. Throws std::invalid_argument unless perm is a
/// bijection on [0, N).
Partition permute(const Partition& partition, std::span<const std::size_t> perm);

/// Uniformly random permutation of [0, n) by Fisher-Yates.
std::vector<std::size_t> random_permutation(std::size_t n, RandomStream& rng);

}  // namespace bnp
