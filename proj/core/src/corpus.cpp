#include "intent_router/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "intent_router/error.hpp"
#include "intent_router/rng.hpp"

namespace intent_router {

std::vector<Route> builtin_routes() {
  return {
      {"Deployment Intent",
       {"Deploy a new network in [region] with the following specifications..."},
       kDefaultThreshold,
       "deploy"},
      {"Modification Intent",
       {"Modify the existing [network] to address the performance issues caused by high loading..."},
       kDefaultThreshold,
       "modify"},
      {"Performance Assurance Intent",
       {"Ensure that the deployed network can support a [QoS Level] application with the following "
        "requirements..."},
       kDefaultThreshold,
       "assure"},
      {"Intent Report Request",
       {"Summarize the results of the previous request."},
       kDefaultThreshold,
       "report"},
      {"Intent Feasibility Check",
       {"Before proceeding, ensure that capacity exists in [region] to perform the required changes."},
       kDefaultThreshold,
       "feasibility_check"},
      {"Regular Notification Request",
       {"Notify me of the status of [network] every [frequency]."},
       kDefaultThreshold,
       "schedule_notification"},
  };
}

std::vector<std::string> builtin_route_names() {
  std::vector<std::string> names;
  for (const auto& r : builtin_routes()) names.push_back(r.name);
  return names;
}

void UtteranceSpec::validate() const {
  std::vector<std::string> problems;
  if (seeds < 0 || variability < 0 || paraphrase < 0) problems.push_back("utterance counts must be >= 0");
  if (variability > seeds) problems.push_back("variability count exceeds seed count in " + label());
  if (paraphrase > seeds) problems.push_back("paraphrase count exceeds seed count in " + label());
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

std::string UtteranceSpec::label() const {
  return "(" + std::to_string(seeds) + "," + std::to_string(variability) + "," +
         std::to_string(paraphrase) + ")";
}

nlohmann::ordered_json to_json(const UtteranceSpec& spec) {
  return nlohmann::ordered_json{{"seeds", spec.seeds},
                                {"variability", spec.variability},
                                {"paraphrase", spec.paraphrase}};
}

UtteranceSpec utterance_spec_from_json(const nlohmann::json& j) {
  UtteranceSpec spec;
  try {
    if (j.is_array()) {
      if (j.size() != 3) throw ConfigError({"utterance spec array must have three entries"});
      spec = {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
    } else {
      spec.seeds = j.at("seeds").get<int>();
      spec.variability = j.value("variability", 0);
      spec.paraphrase = j.value("paraphrase", 0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({std::string("utterance spec: ") + e.what()});
  }
  spec.validate();
  return spec;
}

Corpus::Corpus(std::vector<LabeledPrompt> prompts, std::span<const std::string> known_labels)
    : prompts_(std::move(prompts)) {
  if (auto issue = index_prompts(known_labels)) {
    throw Error(ErrorCode::kInvalidArgument, "prompt " + std::to_string(issue->index) + ": " + issue->message);
  }
}

Corpus::Corpus(std::vector<LabeledPrompt> prompts, std::span<const std::string> known_labels,
               std::optional<Issue>& issue)
    : prompts_(std::move(prompts)) {
  issue = index_prompts(known_labels);
}

std::optional<Corpus::Issue> Corpus::index_prompts(std::span<const std::string> known_labels) {
  const std::vector<std::string> defaults = builtin_route_names();
  const auto labels = known_labels.empty() ? std::span<const std::string>(defaults) : known_labels;
  const std::set<std::string> allowed(labels.begin(), labels.end());

  std::map<std::string, std::size_t> seed_by_id;
  for (std::size_t i = 0; i < prompts_.size(); ++i) {
    const auto& p = prompts_[i];
    if (p.text.empty()) return Issue{i, "empty text"};
    if (p.label != kNoneRoute && !allowed.contains(p.label)) return Issue{i, "unknown label '" + p.label + "'"};
    if (p.variant == Variant::kSeed && !p.source_id.empty() && !seed_by_id.emplace(p.source_id, i).second) {
      return Issue{i, "duplicate seed id '" + p.source_id + "'"};
    }
  }
  for (std::size_t i = 0; i < prompts_.size(); ++i) {
    const auto& p = prompts_[i];
    if (p.variant != Variant::kVariability && p.variant != Variant::kParaphrase) continue;
    auto it = seed_by_id.find(p.source_id);
    if (it == seed_by_id.end()) return Issue{i, "derives from unknown seed '" + p.source_id + "'"};
    if (prompts_[it->second].label != p.label) {
      return Issue{i, "label differs from its seed '" + p.source_id + "'"};
    }
    provenance_.emplace(i, it->second);
    derived_.emplace(it->second, i);
  }
  return std::nullopt;
}

std::vector<std::size_t> Corpus::indices_of(std::string_view label, Variant variant) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < prompts_.size(); ++i) {
    if (prompts_[i].label == label && prompts_[i].variant == variant) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Corpus::derived_from(std::size_t seed_index, Variant kind) const {
  std::vector<std::size_t> out;
  auto [lo, hi] = derived_.equal_range(seed_index);
  for (auto it = lo; it != hi; ++it) {
    if (prompts_[it->second].variant == kind) out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LabeledPrompt> Corpus::seeds() const {
  std::vector<LabeledPrompt> out;
  for (const auto& p : prompts_) {
    if (p.variant == Variant::kSeed) out.push_back(p);
  }
  return out;
}

std::map<std::string, std::size_t> Corpus::count_by_label(Variant variant) const {
  std::map<std::string, std::size_t> out;
  for (const auto& p : prompts_) {
    if (p.variant == variant) ++out[p.label];
  }
  return out;
}

namespace {

LabeledPrompt prompt_from_line(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  for (const char* field : {"text", "label", "variant"}) {
    if (!j.contains(field)) {
      throw Error(ErrorCode::kMissingField, "line " + std::to_string(line) + ": missing field '" + field + "'");
    }
  }
  LabeledPrompt p;
  try {
    p.text = j.at("text").get<std::string>();
    p.label = j.at("label").get<std::string>();
    const auto variant = j.at("variant").get<std::string>();
    auto v = parse_variant(variant);
    if (!v) throw ParseError("unknown variant '" + variant + "'", line);
    p.variant = *v;
    if (j.contains("source_id") && !j.at("source_id").is_null()) p.source_id = j.at("source_id").get<std::string>();
    if (j.contains("fold") && !j.at("fold").is_null()) p.fold = j.at("fold").get<int>();
    if (j.contains("origin")) {
      const auto origin = j.at("origin").get<std::string>();
      auto o = parse_origin(origin);
      if (!o) throw ParseError("unknown origin '" + origin + "'", line);
      p.origin = *o;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), line);
  }
  return p;
}

}  // namespace

Corpus parse_corpus(std::string_view jsonl, std::span<const std::string> known_labels) {
  std::vector<LabeledPrompt> prompts;
  std::vector<std::size_t> lines;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(e.what(), line_no);
    }
    prompts.push_back(prompt_from_line(j, line_no));
    lines.push_back(line_no);
  }
  std::optional<Corpus::Issue> issue;
  Corpus corpus(std::move(prompts), known_labels, issue);
  if (issue) throw ParseError(issue->message, lines[issue->index]);
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::span<const std::string> known_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), known_labels);
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& p : corpus.prompts()) {
    out += to_json(p).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write corpus " + path.string());
  out << serialize_corpus(corpus);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

ComposedUtterances compose_utterances(const Corpus& corpus, const UtteranceSpec& spec,
                                      std::string_view route, std::uint64_t seed) {
  spec.validate();
  ComposedUtterances out;

  const auto bases = corpus.indices_of(route, Variant::kBase);
  if (!bases.empty()) {
    out.utterances.push_back(corpus.prompts()[bases.front()].text);
  } else {
    for (const auto& r : builtin_routes()) {
      if (r.name == route) out.utterances.push_back(r.utterances.front());
    }
  }
  if (out.utterances.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no base utterance for route " + std::string(route));
  }

  std::vector<std::size_t> candidates;
  for (std::size_t idx : corpus.indices_of(route, Variant::kSeed)) {
    if (spec.variability > 0 && corpus.derived_from(idx, Variant::kVariability).empty()) continue;
    if (spec.paraphrase > 0 && corpus.derived_from(idx, Variant::kParaphrase).empty()) continue;
    candidates.push_back(idx);
  }
  if (candidates.size() < static_cast<std::size_t>(spec.seeds)) {
    throw Error(ErrorCode::kInsufficientPrompts,
                std::string(route) + ": needed " + std::to_string(spec.seeds) + " seeds, available " +
                    std::to_string(candidates.size()));
  }
  DeterministicRng rng(derive_seed(seed, route));
  rng.shuffle(std::span(candidates));
  candidates.resize(static_cast<std::size_t>(spec.seeds));

  for (std::size_t idx : candidates) {
    out.utterances.push_back(corpus.prompts()[idx].text);
    out.consumed.push_back(idx);
  }
  auto attach = [&](int count, Variant kind) {
    for (int i = 0; i < count; ++i) {
      const auto derived = corpus.derived_from(candidates[static_cast<std::size_t>(i)], kind);
      out.utterances.push_back(corpus.prompts()[derived.front()].text);
      out.consumed.push_back(derived.front());
    }
  };
  attach(spec.variability, Variant::kVariability);
  attach(spec.paraphrase, Variant::kParaphrase);
  return out;
}

}  // namespace intent_router
