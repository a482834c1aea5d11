#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bnp/random.hpp"

namespace bnp {

/// log(sum(exp(x))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// log(mean(exp(x))). Requires a non-empty input.
double log_mean_exp(std::span<const double> x);

/// Subtracts log_sum_exp in place so the weights exponentiate to 1.
void normalize_log(std::vector<double>& x);

/// Draws an index with probability proportional to exp(log_weights[i]).
std::size_t sample_log_categorical(std::span<const double> log_weights, RandomStream& rng);

double sample_mean(std::span<const double> x);
/// Unbiased (n - 1) sample standard deviation; 0 for fewer than two values.
double sample_sd(std::span<const double> x);

}  // namespace bnp
