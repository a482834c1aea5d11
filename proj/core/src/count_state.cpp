#include <algorithm>
#include <stdexcept>
#include <string>

#include "bnp/doc_model.hpp"

namespace bnp {

CountState::CountState(std::size_t vocab_size) : vocab_size_(vocab_size), corpus_words_(vocab_size, 0) {}

void CountState::resize_vocab(std::size_t vocab_size) {
  if (vocab_size < vocab_size_) throw std::invalid_argument("CountState::resize_vocab: vocabulary cannot shrink");
  vocab_size_ = vocab_size;
  corpus_words_.resize(vocab_size, 0);
  for (auto& w : words_) {
    if (!w.empty()) w.resize(vocab_size, 0);
  }
}

ClusterId CountState::open_cluster() {
  if (!free_.empty()) {
    // Lowest free slot first, so slot choice is a function of the state alone.
    auto it = std::min_element(free_.begin(), free_.end());
    const ClusterId c = *it;
    free_.erase(it);
    words_[c].assign(vocab_size_, 0);
    return c;
  }
  words_.emplace_back(vocab_size_, 0);
  tokens_.push_back(0);
  docs_.push_back(0);
  return static_cast<ClusterId>(docs_.size() - 1);
}

void CountState::add_document(std::span<const WordId> doc, ClusterId cluster) {
  if (cluster >= docs_.size()) throw std::out_of_range("CountState::add_document: unknown cluster slot");
  if (std::find(free_.begin(), free_.end(), cluster) != free_.end()) {
    throw std::logic_error("CountState::add_document: cluster slot is not open");
  }
  for (WordId w : doc) {
    if (w >= vocab_size_) throw std::out_of_range("CountState::add_document: word id outside vocabulary");
  }
  if (words_[cluster].size() != vocab_size_) words_[cluster].assign(vocab_size_, 0);
  for (WordId w : doc) {
    ++words_[cluster][w];
    ++corpus_words_[w];
  }
  tokens_[cluster] += doc.size();
  corpus_tokens_ += doc.size();
  if (docs_[cluster]++ == 0) ++active_;
}

void CountState::remove_document(std::span<const WordId> doc, ClusterId cluster) {
  if (!is_active(cluster)) throw std::logic_error("CountState::remove_document: cluster holds no documents");
  for (WordId w : doc) {
    if (w >= vocab_size_ || words_[cluster][w] == 0) {
      throw std::logic_error("CountState::remove_document: document is not part of cluster " + std::to_string(cluster));
    }
    --words_[cluster][w];
    --corpus_words_[w];
  }
  tokens_[cluster] -= doc.size();
  corpus_tokens_ -= doc.size();
  if (--docs_[cluster] == 0) {
    --active_;
    if (tokens_[cluster] != 0) throw std::logic_error("CountState::remove_document: emptied cluster still holds tokens");
    free_.push_back(cluster);
  }
}

std::vector<ClusterId> CountState::active_clusters() const {
  std::vector<ClusterId> out;
  for (ClusterId c = 0; c < docs_.size(); ++c) {
    if (docs_[c] > 0) out.push_back(c);
  }
  return out;
}

void CountState::compact(std::span<const ClusterId> order) {
  if (order.size() != active_) throw std::invalid_argument("CountState::compact: order must list every active slot");
  std::vector<std::vector<std::uint32_t>> words;
  std::vector<std::uint64_t> tokens, docs;
  words.reserve(order.size());
  for (ClusterId c : order) {
    if (!is_active(c)) throw std::invalid_argument("CountState::compact: slot is not active");
    words.push_back(std::move(words_[c]));
    tokens.push_back(tokens_[c]);
    docs.push_back(docs_[c]);
  }
  words_ = std::move(words);
  tokens_ = std::move(tokens);
  docs_ = std::move(docs);
  free_.clear();
}

bool operator==(const CountState& a, const CountState& b) {
  if (a.vocab_size_ != b.vocab_size_ || a.corpus_tokens_ != b.corpus_tokens_ || a.active_ != b.active_ ||
      a.corpus_words_ != b.corpus_words_) {
    return false;
  }
  const std::size_t slots = std::max(a.docs_.size(), b.docs_.size());
  for (ClusterId c = 0; c < slots; ++c) {
    const bool in_a = a.is_active(c);
    if (in_a != b.is_active(c)) return false;
    if (!in_a) continue;
    if (a.docs_[c] != b.docs_[c] || a.tokens_[c] != b.tokens_[c] || a.words_[c] != b.words_[c]) return false;
  }
  return true;
}

}  // namespace bnp
