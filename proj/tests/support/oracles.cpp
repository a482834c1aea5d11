#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace oracle {

namespace {

double lse(const std::vector<double>& v) {
  double m = -INFINITY;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

std::vector<double> predictive(Kind kind, double theta, double alpha, const Labels& labels) {
  std::vector<unsigned> order;
  std::map<unsigned, double> size;
  for (unsigned l : labels) {
    if (!size.count(l)) order.push_back(l);
    size[l] += 1;
  }
  const double n = static_cast<double>(labels.size());
  const double k = static_cast<double>(order.size());
  std::vector<double> out;
  if (labels.empty()) return {1.0};
  for (unsigned l : order) {
    switch (kind) {
      case Kind::DP: out.push_back(size[l] / (n + theta)); break;
      case Kind::PY: out.push_back((size[l] - alpha) / (n + theta)); break;
      case Kind::UP: out.push_back(1.0 / (k + theta)); break;
    }
  }
  switch (kind) {
    case Kind::DP: out.push_back(theta / (n + theta)); break;
    case Kind::PY: out.push_back((theta + k * alpha) / (n + theta)); break;
    case Kind::UP: out.push_back(theta / (k + theta)); break;
  }
  return out;
}

double log_joint(Kind kind, double theta, double alpha, const Labels& labels) {
  double lp = 0;
  Labels prefix;
  std::vector<unsigned> seen;
  for (unsigned l : labels) {
    const auto p = predictive(kind, theta, alpha, prefix);
    const auto it = std::find(seen.begin(), seen.end(), l);
    const std::size_t idx = it == seen.end() ? seen.size() : static_cast<std::size_t>(it - seen.begin());
    lp += std::log(p[idx]);
    if (it == seen.end()) seen.push_back(l);
    prefix.push_back(l);
  }
  return lp;
}

std::vector<Labels> canonical_sequences(unsigned n) {
  std::vector<Labels> out;
  Labels cur;
  std::function<void(unsigned)> rec = [&](unsigned k) {
    if (cur.size() == n) {
      out.push_back(cur);
      return;
    }
    for (unsigned v = 0; v <= k; ++v) {
      cur.push_back(v);
      rec(v == k ? k + 1 : k);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

Labels canonicalize(const Labels& labels) {
  std::map<unsigned, unsigned> m;
  Labels out;
  for (unsigned l : labels) {
    auto it = m.find(l);
    if (it == m.end()) it = m.emplace(l, static_cast<unsigned>(m.size())).first;
    out.push_back(it->second);
  }
  return out;
}

std::size_t sequence_index(const std::vector<Labels>& all, const Labels& canonical) {
  const auto it = std::find(all.begin(), all.end(), canonical);
  if (it == all.end()) throw std::logic_error("not a canonical sequence");
  return static_cast<std::size_t>(it - all.begin());
}

double doc_loglik(const Doc& doc, const std::vector<Doc>& other_docs, const Labels& other_labels, long target,
                  const Hypers& h, std::size_t vocab) {
  double lp = 0;
  for (std::size_t n = 0; n < doc.size(); ++n) {
    const auto w = doc[n];
    double prefix_w = 0;
    for (std::size_t m = 0; m < n; ++m) prefix_w += doc[m] == w;
    double nw = prefix_w, ntot = static_cast<double>(n);
    double nwc = prefix_w, nc = static_cast<double>(n);
    for (std::size_t o = 0; o < other_docs.size(); ++o) {
      for (auto x : other_docs[o]) {
        nw += x == w;
        ntot += 1;
        if (target >= 0 && other_labels[o] == static_cast<unsigned>(target)) {
          nwc += x == w;
          nc += 1;
        }
      }
    }
    const double p_co = (nw + h.beta0 / static_cast<double>(vocab)) / (ntot + h.beta0);
    const double p_cl = (nwc + h.beta1 * p_co) / (nc + h.beta1);
    const double p = (prefix_w + h.beta * p_cl) / (static_cast<double>(n) + h.beta);
    lp += std::log(p);
  }
  return lp;
}

double chain_rule_loglik(const std::vector<Doc>& docs, const Labels& labels, const Hypers& h, std::size_t vocab) {
  double lp = 0;
  std::vector<Doc> before;
  Labels before_labels;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const bool seen = std::find(before_labels.begin(), before_labels.end(), labels[d]) != before_labels.end();
    lp += doc_loglik(docs[d], before, before_labels, seen ? static_cast<long>(labels[d]) : -1, h, vocab);
    before.push_back(docs[d]);
    before_labels.push_back(labels[d]);
  }
  return lp;
}

std::vector<double> enumerated_posterior(Kind kind, double theta, const std::vector<Doc>& docs, const Hypers& h,
                                         std::size_t vocab) {
  const auto all = canonical_sequences(static_cast<unsigned>(docs.size()));
  std::vector<double> lw;
  for (const auto& c : all) lw.push_back(log_joint(kind, theta, 0.0, c) + chain_rule_loglik(docs, c, h, vocab));
  const double z = lse(lw);
  std::vector<double> p;
  for (double x : lw) p.push_back(std::exp(x - z));
  return p;
}

std::vector<double> gibbs_stationary(Kind kind, double theta, const std::vector<Doc>& docs, const Hypers& h,
                                     std::size_t vocab) {
  const auto all = canonical_sequences(static_cast<unsigned>(docs.size()));
  const std::size_t s_count = all.size();
  const std::size_t d_count = docs.size();
  // Full-sweep transition matrix, rows = from.
  std::vector<std::vector<double>> sweep(s_count, std::vector<double>(s_count, 0.0));
  for (std::size_t s = 0; s < s_count; ++s) sweep[s][s] = 1.0;

  for (std::size_t d = 0; d < d_count; ++d) {
    std::vector<std::vector<double>> step(s_count, std::vector<double>(s_count, 0.0));
    for (std::size_t s = 0; s < s_count; ++s) {
      const Labels& c = all[s];
      std::vector<Doc> others;
      Labels other_labels;
      std::vector<unsigned> candidates;
      for (std::size_t o = 0; o < d_count; ++o) {
        if (o == d) continue;
        others.push_back(docs[o]);
        other_labels.push_back(c[o]);
        if (std::find(candidates.begin(), candidates.end(), c[o]) == candidates.end()) candidates.push_back(c[o]);
      }
      const unsigned fresh = static_cast<unsigned>(d_count + 1);
      std::vector<double> lw;
      std::vector<Labels> targets;
      for (std::size_t i = 0; i <= candidates.size(); ++i) {
        const bool is_new = i == candidates.size();
        const unsigned v = is_new ? fresh : candidates[i];
        Labels next = c;
        next[d] = v;
        double prior;
        if (kind == Kind::UP) {
          prior = log_joint(Kind::UP, theta, 0.0, next);
        } else {
          double members = 0;
          for (unsigned l : other_labels) members += l == v;
          prior = std::log(is_new ? theta : members);
        }
        lw.push_back(prior + doc_loglik(docs[d], others, other_labels, is_new ? -1L : static_cast<long>(v), h, vocab));
        targets.push_back(canonicalize(next));
      }
      const double z = lse(lw);
      for (std::size_t i = 0; i < lw.size(); ++i) step[s][sequence_index(all, targets[i])] += std::exp(lw[i] - z);
    }
    std::vector<std::vector<double>> next(s_count, std::vector<double>(s_count, 0.0));
    for (std::size_t a = 0; a < s_count; ++a)
      for (std::size_t b = 0; b < s_count; ++b)
        if (sweep[a][b] != 0.0)
          for (std::size_t e = 0; e < s_count; ++e) next[a][e] += sweep[a][b] * step[b][e];
    sweep = std::move(next);
  }

  std::vector<double> pi(s_count, 1.0 / static_cast<double>(s_count));
  for (int it = 0; it < 20000; ++it) {
    std::vector<double> nxt(s_count, 0.0);
    for (std::size_t a = 0; a < s_count; ++a)
      for (std::size_t b = 0; b < s_count; ++b) nxt[b] += pi[a] * sweep[a][b];
    double diff = 0;
    for (std::size_t a = 0; a < s_count; ++a) diff += std::fabs(nxt[a] - pi[a]);
    pi = std::move(nxt);
    if (diff < 1e-15) break;
  }
  return pi;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

double up_expected_k(double theta, std::uint64_t n) {
  // dist[j] = P(K = lo + j)
  std::vector<double> dist{1.0};
  std::uint64_t lo = 1;
  for (std::uint64_t step = 1; step < n; ++step) {
    std::vector<double> next(dist.size() + 1, 0.0);
    for (std::size_t j = 0; j < dist.size(); ++j) {
      const double k = static_cast<double>(lo + j);
      const double p_new = theta / (k + theta);
      next[j] += dist[j] * (1.0 - p_new);
      next[j + 1] += dist[j] * p_new;
    }
    std::size_t first = 0, last = next.size();
    while (first < last && next[first] < 1e-300) ++first;
    while (last > first && next[last - 1] < 1e-300) --last;
    lo += first;
    dist.assign(next.begin() + static_cast<std::ptrdiff_t>(first), next.begin() + static_cast<std::ptrdiff_t>(last));
  }
  double e = 0, mass = 0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    e += dist[j] * static_cast<double>(lo + j);
    mass += dist[j];
  }
  return e / mass;
}

double py_expected_k(double theta, double alpha, std::uint64_t n) {
  double e = 1.0;
  for (std::uint64_t m = 1; m < n; ++m) e += (theta + alpha * e) / (static_cast<double>(m) + theta);
  return e;
}

double dp_expected_k(double theta, std::uint64_t n) {
  double s = 0;
  for (std::uint64_t i = 0; i < n; ++i) s += theta / (theta + static_cast<double>(i));
  return s;
}

double heldout_log_prob(Kind kind, double theta, const std::vector<Doc>& train, const Labels& train_labels,
                        const std::vector<Doc>& test, const Hypers& h, std::size_t vocab) {
  unsigned k_train = 0;
  for (unsigned l : train_labels) k_train = std::max(k_train, l + 1);
  std::vector<double> terms;
  Labels ext(test.size());
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t t, unsigned k) {
    if (t == test.size()) {
      double lp = 0;
      std::vector<Doc> docs = train;
      Labels labels = train_labels;
      for (std::size_t i = 0; i < test.size(); ++i) {
        const auto p = predictive(kind, theta, 0.0, canonicalize(labels));
        // canonical position of ext[i] among the clusters seen so far
        const Labels canon = canonicalize(labels);
        std::map<unsigned, unsigned> to_canon;
        for (std::size_t j = 0; j < labels.size(); ++j) to_canon[labels[j]] = canon[j];
        const bool seen = to_canon.count(ext[i]) > 0;
        lp += std::log(p[seen ? to_canon[ext[i]] : p.size() - 1]);
        lp += doc_loglik(test[i], docs, labels, seen ? static_cast<long>(ext[i]) : -1L, h, vocab);
        docs.push_back(test[i]);
        labels.push_back(ext[i]);
      }
      terms.push_back(lp);
      return;
    }
    for (unsigned v = 0; v <= k; ++v) {
      ext[t] = v;
      rec(t + 1, v == k ? k + 1 : k);
    }
  };
  rec(0, k_train);
  return lse(terms);
}

}  // namespace oracle
