#include "bnp/prior_process.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace bnp {

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::Dirichlet: return "dirichlet";
    case ProcessKind::PitmanYor: return "pitman-yor";
    case ProcessKind::Uniform: return "uniform";
  }
  return "unknown";
}

std::string_view short_name(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::Dirichlet: return "dp";
    case ProcessKind::PitmanYor: return "py";
    case ProcessKind::Uniform: return "up";
  }
  return "unknown";
}

ProcessKind parse_process_kind(std::string_view name) {
  if (name == "dp" || name == "dirichlet") return ProcessKind::Dirichlet;
  if (name == "py" || name == "pitman-yor" || name == "pitmanyor") return ProcessKind::PitmanYor;
  if (name == "up" || name == "uniform") return ProcessKind::Uniform;
  throw std::invalid_argument("unknown process '" + std::string(name) + "' (expected dp, py or up)");
}

PriorSpec::PriorSpec(ProcessKind kind, double theta, double alpha)
    : kind_(kind), theta_(theta), alpha_(kind == ProcessKind::PitmanYor ? alpha : 0.0) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("PriorSpec: theta must be a positive finite number");
  }
  if (kind == ProcessKind::PitmanYor && !(alpha >= 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("PriorSpec: Pitman-Yor discount must satisfy 0 <= alpha < 1");
  }
}

Partition Partition::from_labels(std::span<const Label> labels) {
  Partition p;
  p.labels_.reserve(labels.size());
  std::unordered_map<Label, Label> remap;
  for (Label external : labels) {
    const auto [it, inserted] = remap.try_emplace(external, static_cast<Label>(remap.size()));
    p.append(it->second);
  }
  return p;
}

void Partition::append(Label label) {
  if (label > sizes_.size()) {
    throw std::invalid_argument("Partition::append: label " + std::to_string(label) +
                                " breaks canonical labeling (K = " + std::to_string(sizes_.size()) + ")");
  }
  if (label == sizes_.size()) sizes_.push_back(0);
  ++sizes_[label];
  labels_.push_back(label);
}

std::vector<double> predictive_log_probs(const PriorSpec& spec, const Partition& partition) {
  const std::size_t k_count = partition.num_clusters();
  if (k_count == 0) return {0.0};

  const double n = static_cast<double>(partition.size());
  const double k = static_cast<double>(k_count);
  const double theta = spec.theta();
  std::vector<double> out(k_count + 1);
  const auto sizes = partition.sizes();

  switch (spec.kind()) {
    case ProcessKind::Dirichlet: {
      const double z = std::log(n + theta);
      for (std::size_t i = 0; i < k_count; ++i) out[i] = std::log(static_cast<double>(sizes[i])) - z;
      out[k_count] = std::log(theta) - z;
      break;
    }
    case ProcessKind::PitmanYor: {
      const double alpha = spec.alpha();
      const double z = std::log(n + theta);
      for (std::size_t i = 0; i < k_count; ++i) out[i] = std::log(static_cast<double>(sizes[i]) - alpha) - z;
      out[k_count] = std::log(theta + k * alpha) - z;
      break;
    }
    case ProcessKind::Uniform: {
      const double z = std::log(k + theta);
      for (std::size_t i = 0; i < k_count; ++i) out[i] = -z;
      out[k_count] = std::log(theta) - z;
      break;
    }
  }
  return out;
}

Label draw_next_label(const PriorSpec& spec, const Partition& partition, RandomStream& rng) {
  const std::size_t k_count = partition.num_clusters();
  if (k_count == 0) return 0;

  const auto n = partition.size();
  const double theta = spec.theta();
  const auto new_label = static_cast<Label>(k_count);

  switch (spec.kind()) {
    case ProcessKind::Dirichlet: {
      // Joining cluster k with probability N_k/(N+theta) is the same as copying
      // the label of a uniformly chosen earlier observation.
      if (rng.uniform() * (static_cast<double>(n) + theta) < theta) return new_label;
      return partition[rng.below(n)];
    }
    case ProcessKind::PitmanYor: {
      const double alpha = spec.alpha();
      const double new_mass = theta + static_cast<double>(k_count) * alpha;
      if (rng.uniform() * (static_cast<double>(n) + theta) < new_mass) return new_label;
      // Existing cluster with probability proportional to N_k - alpha: propose
      // by size, accept with (N_k - alpha) / N_k.
      for (;;) {
        const Label k = partition[rng.below(n)];
        const double size = partition.sizes()[k];
        if (alpha == 0.0 || rng.uniform() * size < size - alpha) return k;
      }
    }
    case ProcessKind::Uniform: {
      if (rng.uniform() * (static_cast<double>(k_count) + theta) < theta) return new_label;
      return static_cast<Label>(rng.below(k_count));
    }
  }
  return new_label;
}

Partition sample_next(const PriorSpec& spec, const Partition& partition, RandomStream& rng) {
  Partition next = partition;
  next.append(draw_next_label(spec, partition, rng));
  return next;
}

Partition sample_partition(const PriorSpec& spec, std::size_t n, RandomStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_partition: n must be at least 1");
  Partition p;
  p.reserve(n);
  for (std::size_t i = 0; i < n; ++i) p.append(draw_next_label(spec, p, rng));
  return p;
}

double log_joint(const PriorSpec& spec, const Partition& partition) {
  const double theta = spec.theta();
  const double alpha = spec.alpha();
  const double log_theta = std::log(theta);
  std::vector<std::uint32_t> sizes;
  sizes.reserve(partition.num_clusters());

  double total = 0.0;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const Label c = partition[i];
    const double n = static_cast<double>(i);
    const double k = static_cast<double>(sizes.size());
    const bool is_new = c == sizes.size();
    if (i > 0) {
      switch (spec.kind()) {
        case ProcessKind::Dirichlet:
          total += (is_new ? log_theta : std::log(static_cast<double>(sizes[c]))) - std::log(n + theta);
          break;
        case ProcessKind::PitmanYor:
          total += (is_new ? std::log(theta + k * alpha) : std::log(sizes[c] - alpha)) - std::log(n + theta);
          break;
        case ProcessKind::Uniform:
          total += (is_new ? log_theta : 0.0) - std::log(k + theta);
          break;
      }
    }
    if (is_new) sizes.push_back(0);
    ++sizes[c];
  }
  return total;
}

Partition permute(const Partition& partition, std::span<const std::size_t> perm) {
  const std::size_t n = partition.size();
  if (perm.size() != n) throw std::invalid_argument("permute: permutation length does not match partition size");
  std::vector<char> seen(n, 0);
  std::vector<Label> reordered(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = perm[i];
    if (src >= n || seen[src]) throw std::invalid_argument("permute: not a permutation of 0..N-1");
    seen[src] = 1;
    reordered[i] = partition[src];
  }
  return Partition::from_labels(reordered);
}

std::vector<std::size_t> random_permutation(std::size_t n, RandomStream& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace bnp
