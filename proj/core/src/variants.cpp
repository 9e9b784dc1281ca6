#include "intent_router/variants.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "intent_router/embedding.hpp"

namespace intent_router {

std::string_view instruction_for(Variant kind) {
  switch (kind) {
    case Variant::kVariability: return kVariabilityInstruction;
    case Variant::kParaphrase: return kParaphraseInstruction;
    default: break;
  }
  throw Error(ErrorCode::kInvalidArgument, "variants are either variability or paraphrase");
}

LlmVariantGenerator::LlmVariantGenerator(const ChatClient& client, std::size_t batch_size)
    : client_(client), batch_size_(std::max<std::size_t>(batch_size, 1)) {}

std::string LlmVariantGenerator::format_numbered(std::span<const std::string> seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    out += std::to_string(i + 1) + ". " + seeds[i] + "\n";
  }
  return out;
}

std::vector<std::string> LlmVariantGenerator::parse_numbered(std::string_view reply, std::size_t expected) {
  static const std::regex item(R"(^\s*\**\s*(\d+)\s*[.):]\s*\**\s*(.*?)\s*$)");
  std::vector<std::string> out(expected);
  std::istringstream in{std::string(reply)};
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, item)) continue;
    const auto n = std::stoul(m[1].str());
    if (n == 0 || n > expected || !out[n - 1].empty()) continue;
    std::string text = m[2].str();
    // Strip wrapping quotes the model may add.
    if (text.size() >= 2 && (text.front() == '"' || text.front() == '\'') && text.back() == text.front()) {
      text = text.substr(1, text.size() - 2);
    }
    out[n - 1] = text;
  }
  return out;
}

std::vector<std::string> LlmVariantGenerator::transform(std::span<const std::string> seeds, Variant kind) const {
  const auto instruction = instruction_for(kind);
  std::vector<std::string> out;
  out.reserve(seeds.size());
  for (std::size_t begin = 0; begin < seeds.size(); begin += batch_size_) {
    const auto batch = seeds.subspan(begin, std::min(batch_size_, seeds.size() - begin));
    const std::vector<ChatMessage> messages{{"system", std::string(instruction)},
                                            {"user", format_numbered(batch)}};
    const auto parsed = parse_numbered(client_.complete(messages), batch.size());
    out.insert(out.end(), parsed.begin(), parsed.end());
  }
  return out;
}

namespace {

// Interchangeable phrasings; a variability rewrite takes the next member of a
// group, a paraphrase the one after that.
const std::vector<std::vector<std::string>>& synonym_groups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"deploy", "roll out", "provision", "set up", "launch", "spin up"},
      {"deployed", "rolled out", "provisioned", "launched"},
      {"configuration parameters", "parameter settings", "config settings"},
      {"enhance throughput", "boost data transfer rates", "raise throughput"},
      {"adjust", "modify", "tweak", "reconfigure", "change"},
      {"update", "revise"},
      {"ensure", "guarantee", "make sure"},
      {"maintain", "sustain", "uphold"},
      {"summarize", "recap", "sum up"},
      {"summary", "recap", "rundown"},
      {"results", "outcome", "findings"},
      {"previous", "last", "prior"},
      {"report back on", "get back to me with", "fill me in on"},
      {"report", "summary report", "write-up"},
      {"check", "verify", "confirm"},
      {"whether", "if"},
      {"enough", "sufficient", "adequate"},
      {"capacity", "headroom", "available capacity"},
      {"feasible", "possible", "viable"},
      {"feasibility", "viability"},
      {"notify me", "alert me"},
      {"let me know", "tell me"},
      {"send me", "give me", "forward me"},
      {"status", "state", "condition"},
      {"congestion", "heavy traffic", "overload"},
      {"increase", "raise", "boost"},
      {"reduce", "lower", "cut"},
      {"support", "accommodate", "cope with"},
      {"handle", "absorb", "manage"},
      {"requirements", "specifications", "constraints"},
      {"application", "service", "workload"},
      {"please", "kindly"},
      {"determine", "assess", "establish"},
      {"can you", "could you", "would you"},
      {"i want", "i would like", "i need"},
      {"instances", "replicas", "copies"},
      {"latency", "delay", "response time"},
      {"issues", "problems", "degradation"},
      {"new", "fresh"},
      {"existing", "current"},
      {"high load", "heavy load", "peak demand"},
      {"performance", "service quality"},
      {"every hour", "hourly", "once an hour"},
      {"every day", "daily", "once a day"},
      {"every week", "weekly", "once a week"},
      {"health", "condition", "wellbeing"},
      {"region", "area", "zone"},
  };
  return groups;
}

struct SynonymEntry {
  std::string phrase;
  std::size_t group;
  std::size_t member;
};

const std::vector<SynonymEntry>& synonym_entries() {
  static const std::vector<SynonymEntry> entries = [] {
    std::vector<SynonymEntry> out;
    const auto& groups = synonym_groups();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      for (std::size_t m = 0; m < groups[g].size(); ++m) out.push_back({groups[g][m], g, m});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.phrase.size() > b.phrase.size(); });
    return out;
  }();
  return entries;
}

bool is_word_char(char c) { return c == '-' || std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string substitute(std::string_view text, std::size_t shift) {
  const std::string lower = to_lower(text);
  const auto& groups = synonym_groups();
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (i == 0 || !is_word_char(text[i - 1])) {
      const SynonymEntry* hit = nullptr;
      for (const auto& e : synonym_entries()) {
        const std::size_t end = i + e.phrase.size();
        if (end > lower.size() || lower.compare(i, e.phrase.size(), e.phrase) != 0) continue;
        if (end < lower.size() && is_word_char(lower[end])) continue;
        hit = &e;
        break;
      }
      if (hit) {
        const auto& group = groups[hit->group];
        std::string replacement = group[(hit->member + shift) % group.size()];
        if (std::isupper(static_cast<unsigned char>(text[i]))) {
          replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
        }
        // "I" stays capitalized wherever a replacement begins with it.
        if (replacement.rfind("i ", 0) == 0) replacement[0] = 'I';
        out += replacement;
        i += hit->phrase.size();
        continue;
      }
    }
    out += text[i];
    ++i;
  }
  return out;
}

std::string strip_terminal(std::string_view s) {
  std::string out(s);
  while (!out.empty() && (out.back() == '.' || out.back() == '?' || out.back() == '!' || out.back() == ' ')) {
    out.pop_back();
  }
  return out;
}

bool starts_with_acronym(std::string_view s) {
  return s.size() >= 2 && std::isupper(static_cast<unsigned char>(s[0])) &&
         std::isupper(static_cast<unsigned char>(s[1]));
}

std::string lower_first(std::string s) {
  if (!s.empty() && !starts_with_acronym(s) && s.rfind("I ", 0) != 0) {
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  }
  return s;
}

std::string upper_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::size_t find_word(const std::string& lower, std::string_view word, std::size_t from = 0) {
  for (auto pos = lower.find(word, from); pos != std::string::npos; pos = lower.find(word, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(lower[pos - 1]);
    const bool right = pos + word.size() >= lower.size() || !is_word_char(lower[pos + word.size()]);
    if (left && right) return pos;
  }
  return std::string::npos;
}

std::string fallback_lead(std::string_view seed) {
  static constexpr std::string_view kLeads[] = {"What I need is the following: ", "Here is my request: ",
                                                "My request is as follows: "};
  return std::string(kLeads[fnv1a64(seed) % std::size(kLeads)]);
}

std::string restructure(std::string_view seed) {
  const std::string body = strip_terminal(seed);
  const std::string lower = to_lower(body);
  const bool question = !seed.empty() && seed.back() == '?';
  const std::string end_mark = question ? "?" : ".";

  // "Before X, Y" -> "Y before X"
  if (lower.rfind("before ", 0) == 0) {
    const auto comma = body.find(", ");
    if (comma != std::string::npos) {
      return upper_first(body.substr(comma + 2)) + " before " + body.substr(7, comma - 7) + end_mark;
    }
  }
  // "Y before X" -> "Before X, Y"
  if (const auto pos = find_word(lower, "before"); pos != std::string::npos && pos > 0) {
    return "Before " + body.substr(pos + 7) + ", " + lower_first(body.substr(0, pos - 1)) + end_mark;
  }

  // Trailing schedule moves to the front.
  for (std::string_view marker : {" every ", " daily", " hourly", " weekly"}) {
    const auto pos = lower.rfind(marker);
    if (pos == std::string::npos || pos < 8) continue;
    std::string tail = body.substr(pos + 1);
    if (std::count(tail.begin(), tail.end(), ' ') > 2 || tail.find(',') != std::string::npos) continue;
    return upper_first(tail) + ", " + lower_first(body.substr(0, pos)) + end_mark;
  }

  // Purpose clause moves to the front.
  static const std::vector<std::string> purpose_verbs = {
      "improve", "reduce", "boost", "enhance", "handle", "support", "address", "relieve", "accommodate",
      "balance", "serve", "cut", "lower", "increase", "meet", "keep", "prepare", "absorb", "cover",
      "avoid", "prevent", "cope", "manage", "free", "raise", "guarantee", "host", "carry"};
  for (auto pos = lower.find(" to "); pos != std::string::npos; pos = lower.find(" to ", pos + 1)) {
    const auto next_end = lower.find(' ', pos + 4);
    const std::string next = lower.substr(pos + 4, next_end == std::string::npos ? std::string::npos : next_end - pos - 4);
    if (std::find(purpose_verbs.begin(), purpose_verbs.end(), next) == purpose_verbs.end()) continue;
    if (std::count(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(pos), ' ') < 2) continue;
    return "To " + body.substr(pos + 4) + ", " + lower_first(body.substr(0, pos)) + end_mark;
  }

  for (std::string_view lead : {"can you ", "could you ", "would you "}) {
    if (lower.rfind(lead, 0) == 0) return "I would like you to " + body.substr(lead.size()) + ".";
  }
  if (lower.rfind("is it ", 0) == 0) return "I want to know whether it is " + body.substr(6) + ".";
  if (question) {
    for (std::string_view wh : {"what ", "how ", "which ", "when ", "where ", "why "}) {
      if (lower.rfind(wh, 0) == 0) return "I would like to know " + lower_first(body) + ".";
    }
  }

  // Prepositional phrase moves to the front, statements only.
  if (!question) {
    for (std::string_view prep : {" in ", " for ", " on ", " at "}) {
      const auto pos = lower.find(prep);
      if (pos == std::string::npos || std::count(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(pos), ' ') < 2) {
        continue;
      }
      if (pos >= 5 && lower.compare(pos - 5, 5, " with") == 0) continue;
      std::size_t end = lower.size();
      for (std::string_view stop : {" with ", " to ", " for ", " in ", " on ", " at ", ", ", ": ", " every ", " so ",
                                    " due ", " meets ", " can ", " has ", " during "}) {
        const auto e = lower.find(stop, pos + prep.size());
        if (e != std::string::npos) end = std::min(end, e);
      }
      const std::string phrase = body.substr(pos + 1, end - pos - 1);
      if (phrase.find(" its ") != std::string::npos || std::count(phrase.begin(), phrase.end(), ' ') > 8) continue;
      return upper_first(phrase) + ", " + lower_first(body.substr(0, pos) + body.substr(end)) + ".";
    }
  }
  if (lower.rfind("please ", 0) == 0) return upper_first(body.substr(7)) + ", please.";
  return fallback_lead(seed) + lower_first(body) + end_mark;
}

}  // namespace

std::string RuleBasedVariantGenerator::vary(std::string_view seed) {
  std::string out = substitute(seed, 1);
  if (out == seed) {
    const std::string lower = to_lower(seed);
    out = lower.rfind("please ", 0) == 0 ? "Kindly " + std::string(seed.substr(7))
                                         : "Please " + lower_first(std::string(seed));
  }
  return out;
}

std::string RuleBasedVariantGenerator::paraphrase(std::string_view seed) {
  std::string out = substitute(restructure(seed), 2);
  if (out == seed) out = fallback_lead(seed) + lower_first(std::string(seed));
  return out;
}

std::vector<std::string> RuleBasedVariantGenerator::transform(std::span<const std::string> seeds,
                                                              Variant kind) const {
  (void)instruction_for(kind);
  std::vector<std::string> out;
  out.reserve(seeds.size());
  for (const auto& s : seeds) out.push_back(kind == Variant::kVariability ? vary(s) : paraphrase(s));
  return out;
}

std::vector<std::string> label_keywords(std::string_view label) {
  if (label == "Deployment Intent") {
    return {"deploy", "roll out", "rolled out", "set up", "provision", "launch", "spin up", "instantiate",
            "establish", "stand up", "bring up", "new", "fresh"};
  }
  if (label == "Modification Intent") {
    return {"modif", "adjust", "change", "updat", "revis", "reconfigur", "alter", "tweak", "scale", "increas",
            "reduc", "migrat", "realloc", "rais", "lower", "boost", "move", "shift", "cut"};
  }
  if (label == "Performance Assurance Intent") {
    return {"ensur", "guarant", "make sure", "assur", "maintain", "sustain", "keep", "uphold", "must", "meet"};
  }
  if (label == "Intent Report Request") {
    return {"summar", "report", "result", "outcome", "recap", "overview", "happen", "went", "finding",
            "sum up", "rundown", "account"};
  }
  if (label == "Intent Feasibility Check") {
    return {"feasib", "viab", "capacity", "headroom", "possible", "enough", "sufficient", "adequate",
            "before", "whether", "if ", "spare"};
  }
  if (label == "Regular Notification Request") {
    return {"notif", "alert", "inform", "let me know", "send me", "give me", "forward me", "posted", "every",
            "periodic", "daily", "hourly", "weekly", "once a", "once an", "subscrib", "update"};
  }
  return {};
}

ValidationFailure::ValidationFailure(std::vector<VariantIssue> issues, std::vector<LabeledPrompt> derived)
    : Error(ErrorCode::kValidationFailure,
            [&] {
              std::string msg = std::to_string(issues.size()) + " derived prompt(s) rejected:";
              for (const auto& i : issues) msg += " [" + std::to_string(i.index) + "] " + i.reason + ";";
              return msg;
            }()),
      issues_(std::move(issues)),
      derived_(std::move(derived)) {}

std::string validate_variant(const LabeledPrompt& seed, std::string_view derived) {
  if (derived.find_first_not_of(" \t\r\n") == std::string_view::npos) return "empty output";
  if (derived == seed.text) return "identical to seed";
  const auto keywords = label_keywords(seed.label);
  if (keywords.empty()) return {};
  const std::string seed_lower = to_lower(seed.text);
  const std::string derived_lower = to_lower(derived);
  auto has_any = [&](const std::string& s) {
    return std::any_of(keywords.begin(), keywords.end(),
                       [&](const std::string& k) { return s.find(k) != std::string::npos; });
  };
  if (has_any(seed_lower) && !has_any(derived_lower)) return "label keywords absent";
  return {};
}

std::vector<LabeledPrompt> generate_variants(std::span<const LabeledPrompt> seeds, Variant kind,
                                             const VariantGenerator& generator) {
  if (seeds.empty()) throw Error(ErrorCode::kEmptyInput, "no seed prompts");
  (void)instruction_for(kind);
  std::vector<std::string> texts;
  texts.reserve(seeds.size());
  for (const auto& s : seeds) texts.push_back(s.text);
  auto outputs = generator.transform(texts, kind);
  outputs.resize(seeds.size());

  std::vector<LabeledPrompt> derived;
  std::vector<VariantIssue> issues;
  derived.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    LabeledPrompt p;
    p.text = outputs[i];
    p.label = seeds[i].label;
    p.variant = kind;
    p.source_id = seeds[i].source_id;
    p.origin = generator.origin();
    if (auto reason = validate_variant(seeds[i], outputs[i]); !reason.empty()) {
      issues.push_back({i, std::move(reason)});
    }
    derived.push_back(std::move(p));
  }
  if (!issues.empty()) throw ValidationFailure(std::move(issues), std::move(derived));
  return derived;
}

std::vector<LabeledPrompt> generate_variants(std::span<const LabeledPrompt> seeds, Variant kind,
                                             const ChatClient& llm) {
  return generate_variants(seeds, kind, LlmVariantGenerator(llm));
}

Corpus build_corpus(std::span<const LabeledPrompt> seeds, const VariantGenerator& generator) {
  const auto variability = generate_variants(seeds, Variant::kVariability, generator);
  const auto paraphrases = generate_variants(seeds, Variant::kParaphrase, generator);
  std::vector<LabeledPrompt> prompts;
  prompts.reserve(seeds.size() * 3);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    prompts.push_back(seeds[i]);
    prompts.push_back(variability[i]);
    prompts.push_back(paraphrases[i]);
  }
  return Corpus(std::move(prompts));
}

}  // namespace intent_router
