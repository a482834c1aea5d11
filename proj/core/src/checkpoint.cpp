#include "bnp/checkpoint.hpp"

#include <fstream>

namespace bnp {

namespace {
constexpr const char* kFormat = "bnp-chain-checkpoint";
constexpr int kVersion = 1;
}  // namespace

nlohmann::json checkpoint_to_json(const ChainState& state, const Corpus& corpus) {
  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["prior"] = {{"process", std::string(short_name(state.prior.kind()))},
                {"theta", state.prior.theta()},
                {"alpha", state.prior.alpha()}};
  j["assignments"] = state.labels;
  j["num_clusters"] = state.counts.num_clusters();
  j["hypers"] = {{"beta", state.hypers.beta}, {"beta1", state.hypers.beta1}, {"beta0", state.hypers.beta0}};
  j["iteration"] = state.iteration;
  j["rng"] = {{"seed", state.rng.seed()}, {"state", state.rng.state()}};
  j["corpus_sha256"] = corpus.content_sha256();
  return j;
}

ChainState checkpoint_from_json(const nlohmann::json& j, const Corpus& corpus) {
  try {
    if (j.at("format").get<std::string>() != kFormat || j.at("version").get<int>() != kVersion) {
      throw CheckpointError("unsupported checkpoint format");
    }
    if (j.at("corpus_sha256").get<std::string>() != corpus.content_sha256()) {
      throw CheckpointError("checkpoint was written for a different corpus");
    }
    const auto& p = j.at("prior");
    const PriorSpec prior(parse_process_kind(p.at("process").get<std::string>()), p.at("theta").get<double>(),
                          p.at("alpha").get<double>());
    const auto& h = j.at("hypers");
    const HyperParams hypers{h.at("beta").get<double>(), h.at("beta1").get<double>(), h.at("beta0").get<double>()};
    const auto labels = j.at("assignments").get<std::vector<Label>>();
    if (labels.size() != corpus.size()) throw CheckpointError("checkpoint assignment count does not match corpus");

    RandomStream rng;
    rng.restore(j.at("rng").at("seed").get<std::uint64_t>(), j.at("rng").at("state").get<std::string>());
    ChainState state = make_chain_state(corpus, prior, hypers, labels, std::move(rng));
    state.iteration = j.at("iteration").get<std::uint64_t>();
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const ChainState& state, const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << checkpoint_to_json(state, corpus).dump(2) << '\n';
}

ChainState load_checkpoint(const std::filesystem::path& path, const Corpus& corpus) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j, corpus);
}

}  // namespace bnp
