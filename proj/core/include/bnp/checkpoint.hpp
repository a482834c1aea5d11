#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bnp/corpus.hpp"
#include "bnp/doc_model.hpp"

namespace bnp {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chain checkpoint schema (format "bnp-chain-checkpoint", version 1):
///
///   {
///     "format": "bnp-chain-checkpoint", "version": 1,
///     "prior": {"process": "up"|"dp", "theta": <real>, "alpha": <real>},
///     "assignments": [<0-based canonical label per document>],
///     "num_clusters": <int>,
///     "hypers": {"beta": <real>, "beta1": <real>, "beta0": <real>},
///     "iteration": <int>,
///     "rng": {"seed": <uint64>, "state": "<mt19937_64 text state>"},
///     "corpus_sha256": "<content hash of the training corpus>"
///   }
nlohmann::json checkpoint_to_json(const ChainState& state, const Corpus& corpus);

/// Restores a chain state; counts are rebuilt from `corpus`. Throws
/// CheckpointError when the corpus hash does not match or the document is
/// malformed.
ChainState checkpoint_from_json(const nlohmann::json& j, const Corpus& corpus);

void save_checkpoint(const ChainState& state, const Corpus& corpus, const std::filesystem::path& path);
ChainState load_checkpoint(const std::filesystem::path& path, const Corpus& corpus);

}  // namespace bnp
