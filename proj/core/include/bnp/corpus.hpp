#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

namespace bnp {

using WordId = std::uint32_t;
using Document = std::vector<WordId>;

class CorpusError : public std::runtime_error {
 public:
  enum class Code { Unreadable, Empty, MalformedUtf8, InvalidSnapshot, EmptySplit, InvalidArgument };

  CorpusError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] Code code() const noexcept { return code_; }

 private:
  Code code_;
};

/// Bidirectional word <-> id map with ids assigned in insertion order.
class Vocabulary {
 public:
  WordId add(std::string_view word);
  [[nodiscard]] std::optional<WordId> find(std::string_view word) const;
  [[nodiscard]] const std::string& word(WordId id) const { return words_.at(id); }
  [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }
  [[nodiscard]] const std::vector<std::string>& words() const noexcept { return words_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> ids_;
};

/// Ordered documents of token ids. Document order is meaningful: the uniform
/// process conditions on it.
struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;
  /// SHA-256 of the file the corpus was read from, when there was one.
  std::string source_sha256;

  [[nodiscard]] std::size_t size() const noexcept { return documents.size(); }
  [[nodiscard]] std::size_t vocab_size() const noexcept { return vocabulary.size(); }
  [[nodiscard]] std::size_t num_tokens() const;
  /// SHA-256 over the canonical JSON of (vocabulary, documents).
  [[nodiscard]] std::string content_sha256() const;
};

struct TokenizerConfig {
  /// Tokens occurring fewer times than this across the corpus are dropped.
  std::uint32_t min_count = 1;
  bool remove_stopwords = false;
  /// Light plural stripping ("nanotubes" -> "nanotube", "bodies" -> "body").
  bool stem = false;
};

/// Lowercases ASCII and splits on runs of characters that are neither ASCII
/// alphanumerics nor part of a multibyte UTF-8 sequence.
std::vector<std::string> tokenize(std::string_view line, const TokenizerConfig& config = {});

/// One document per line; an empty line is an empty document.
Corpus parse_corpus_text(std::string_view text, const TokenizerConfig& config = {});
Corpus load_corpus(const std::filesystem::path& path, const TokenizerConfig& config = {});

/// Tokenizes lines against an existing vocabulary, appending unseen words to
/// it (min_count is not applied).
std::vector<Document> tokenize_with_vocabulary(std::string_view text, Vocabulary& vocabulary,
                                               const TokenizerConfig& config = {});

/// Space-separated words, one document per line.
std::string to_text(const Corpus& corpus);

nlohmann::json to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& j);
void save_corpus_json(const Corpus& corpus, const std::filesystem::path& path);
/// Reads a JSON snapshot when the extension is .json, plain text otherwise.
Corpus load_corpus_any(const std::filesystem::path& path, const TokenizerConfig& config = {});

/// Seeded shuffle then split; both sides share the full vocabulary.
std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double train_fraction, std::uint64_t seed);

struct SynthConfig {
  std::uint32_t num_clusters = 10;
  std::uint32_t docs_per_cluster = 100;
  std::uint32_t vocab_per_cluster = 20;
  std::uint32_t doc_length = 50;
  /// Probability mass each cluster spreads uniformly over the whole vocabulary.
  double overlap = 0.0;
  std::uint64_t seed = 1;
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<std::uint32_t> truth;
};

/// Clusters own disjoint blocks of `vocab_per_cluster` words with
/// Dirichlet(1) weights; an `overlap` share of each cluster's mass is spread
/// uniformly over all words. Documents are shuffled so clusters interleave.
SyntheticCorpus synth_corpus(const SynthConfig& config);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

}  // namespace bnp
