#include "bnp/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "bnp/prior_process.hpp"
#include "bnp/random.hpp"

namespace bnp {

WordId Vocabulary::add(std::string_view word) {
  std::string key(word);
  if (auto it = ids_.find(key); it != ids_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  ids_.emplace(key, id);
  words_.push_back(std::move(key));
  return id;
}

std::optional<WordId> Vocabulary::find(std::string_view word) const {
  if (auto it = ids_.find(std::string(word)); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::size_t Corpus::num_tokens() const {
  std::size_t total = 0;
  for (const auto& d : documents) total += d.size();
  return total;
}

std::string Corpus::content_sha256() const {
  nlohmann::json j;
  j["vocabulary"] = vocabulary.words();
  j["documents"] = documents;
  return sha256_hex(j.dump());
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError(CorpusError::Code::Unreadable, "cannot read " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw CorpusError(CorpusError::Code::Unreadable, "error while reading " + path.string());
  return data;
}

// Returns the byte offset of the first invalid sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    constexpr std::array<std::uint32_t, 5> min_cp{0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_cp[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words{
      "a",    "an",   "and",  "are",  "as",   "at",    "be",   "by",   "for",  "from", "has",
      "have", "in",   "is",   "it",   "its",  "of",    "on",   "or",   "that", "the",  "their",
      "then", "there", "these", "this", "to",  "was",   "were", "which", "with", "wherein", "said"};
  return words;
}

std::string light_stem(std::string word) {
  auto ends_with = [&](std::string_view suffix) {
    return word.size() >= suffix.size() && word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (word.size() > 4 && ends_with("ies")) {
    word.replace(word.size() - 3, 3, "y");
  } else if (word.size() > 3 && ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is")) {
    word.pop_back();
  }
  return word;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (config.stem) current = light_stem(std::move(current));
    if (!(config.remove_stopwords && stopwords().count(current))) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : line) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80) {
      current += ch;
    } else if (std::isalnum(c)) {
      current += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Corpus parse_corpus_text(std::string_view text, const TokenizerConfig& config) {
  if (const auto bad = find_invalid_utf8(text); bad != std::string_view::npos) {
    throw CorpusError(CorpusError::Code::MalformedUtf8, fmt::format("malformed UTF-8 at byte {}", bad));
  }
  const auto lines = split_lines(text);
  if (lines.empty()) throw CorpusError(CorpusError::Code::Empty, "corpus contains no documents");

  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(lines.size());
  std::unordered_map<std::string, std::uint32_t> frequency;
  for (auto line : lines) {
    tokenized.push_back(tokenize(line, config));
    for (const auto& t : tokenized.back()) ++frequency[t];
  }

  Corpus corpus;
  corpus.documents.reserve(lines.size());
  for (const auto& tokens : tokenized) {
    Document doc;
    doc.reserve(tokens.size());
    for (const auto& t : tokens) {
      if (frequency[t] >= config.min_count) doc.push_back(corpus.vocabulary.add(t));
    }
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const TokenizerConfig& config) {
  const std::string data = read_file(path);
  Corpus corpus = parse_corpus_text(data, config);
  corpus.source_sha256 = sha256_hex(data);
  return corpus;
}

std::vector<Document> tokenize_with_vocabulary(std::string_view text, Vocabulary& vocabulary,
                                               const TokenizerConfig& config) {
  if (const auto bad = find_invalid_utf8(text); bad != std::string_view::npos) {
    throw CorpusError(CorpusError::Code::MalformedUtf8, fmt::format("malformed UTF-8 at byte {}", bad));
  }
  std::vector<Document> docs;
  for (auto line : split_lines(text)) {
    Document doc;
    for (const auto& t : tokenize(line, config)) doc.push_back(vocabulary.add(t));
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string to_text(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (i > 0) out += ' ';
      out += corpus.vocabulary.word(doc[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Corpus& corpus) {
  nlohmann::json j;
  j["vocabulary"] = corpus.vocabulary.words();
  j["documents"] = corpus.documents;
  j["sha256"] = corpus.source_sha256.empty() ? corpus.content_sha256() : corpus.source_sha256;
  return j;
}

Corpus corpus_from_json(const nlohmann::json& j) {
  try {
    Corpus corpus;
    for (const auto& w : j.at("vocabulary")) {
      const auto word = w.get<std::string>();
      if (corpus.vocabulary.add(word) + 1 != corpus.vocabulary.size()) {
        throw CorpusError(CorpusError::Code::InvalidSnapshot, "duplicate vocabulary entry '" + word + "'");
      }
    }
    const auto w_count = corpus.vocab_size();
    for (const auto& d : j.at("documents")) {
      Document doc = d.get<Document>();
      for (WordId id : doc) {
        if (id >= w_count) {
          throw CorpusError(CorpusError::Code::InvalidSnapshot, fmt::format("token id {} outside vocabulary of size {}", id, w_count));
        }
      }
      corpus.documents.push_back(std::move(doc));
    }
    if (j.contains("sha256")) corpus.source_sha256 = j.at("sha256").get<std::string>();
    return corpus;
  } catch (const nlohmann::json::exception& e) {
    throw CorpusError(CorpusError::Code::InvalidSnapshot, std::string("invalid corpus snapshot: ") + e.what());
  }
}

void save_corpus_json(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError(CorpusError::Code::Unreadable, "cannot write " + path.string());
  out << to_json(corpus).dump() << '\n';
}

Corpus load_corpus_any(const std::filesystem::path& path, const TokenizerConfig& config) {
  if (path.extension() == ".json") {
    const std::string data = read_file(path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(data);
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError(CorpusError::Code::InvalidSnapshot, std::string("invalid JSON: ") + e.what());
    }
    Corpus corpus = corpus_from_json(j);
    if (corpus.documents.empty()) throw CorpusError(CorpusError::Code::Empty, "corpus contains no documents");
    return corpus;
  }
  return load_corpus(path, config);
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::pair<Corpus, Corpus> split_corpus(const Corpus& corpus, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw CorpusError(CorpusError::Code::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  const std::size_t d = corpus.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(d)));
  if (n_train == 0 || n_train >= d) {
    throw CorpusError(CorpusError::Code::EmptySplit,
                      fmt::format("splitting {} documents at {} leaves one side empty", d, train_fraction));
  }
  RandomStream rng(seed);
  const auto perm = random_permutation(d, rng);
  Corpus train, test;
  train.vocabulary = corpus.vocabulary;
  test.vocabulary = corpus.vocabulary;
  for (std::size_t i = 0; i < d; ++i) {
    (i < n_train ? train : test).documents.push_back(corpus.documents[perm[i]]);
  }
  return {std::move(train), std::move(test)};
}

SyntheticCorpus synth_corpus(const SynthConfig& config) {
  if (config.num_clusters == 0 || config.docs_per_cluster == 0 || config.vocab_per_cluster == 0 ||
      config.doc_length == 0) {
    throw CorpusError(CorpusError::Code::InvalidArgument, "synthetic corpus sizes must be positive");
  }
  if (!(config.overlap >= 0.0 && config.overlap < 1.0)) {
    throw CorpusError(CorpusError::Code::InvalidArgument, "overlap must lie in [0, 1)");
  }

  RandomStream rng(config.seed);
  const std::size_t w_count = static_cast<std::size_t>(config.num_clusters) * config.vocab_per_cluster;
  Corpus corpus;
  for (std::uint32_t k = 0; k < config.num_clusters; ++k) {
    for (std::uint32_t j = 0; j < config.vocab_per_cluster; ++j) corpus.vocabulary.add(fmt::format("c{}w{}", k, j));
  }

  std::vector<Document> docs;
  std::vector<std::uint32_t> truth;
  std::vector<double> cdf(w_count);
  for (std::uint32_t k = 0; k < config.num_clusters; ++k) {
    std::vector<double> own(config.vocab_per_cluster);
    for (double& v : own) v = rng.exponential();
    const double own_total = std::accumulate(own.begin(), own.end(), 0.0);

    double acc = 0.0;
    for (std::size_t w = 0; w < w_count; ++w) {
      double p = config.overlap / static_cast<double>(w_count);
      if (w / config.vocab_per_cluster == k) p += (1.0 - config.overlap) * own[w % config.vocab_per_cluster] / own_total;
      acc += p;
      cdf[w] = acc;
    }
    for (std::uint32_t i = 0; i < config.docs_per_cluster; ++i) {
      Document doc(config.doc_length);
      for (auto& token : doc) {
        const double u = rng.uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        token = static_cast<WordId>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), w_count - 1));
      }
      docs.push_back(std::move(doc));
      truth.push_back(k);
    }
  }

  const auto perm = random_permutation(docs.size(), rng);
  SyntheticCorpus out;
  out.corpus.vocabulary = std::move(corpus.vocabulary);
  for (std::size_t i : perm) {
    out.corpus.documents.push_back(docs[i]);
    out.truth.push_back(truth[i]);
  }
  return out;
}

}  // namespace bnp
