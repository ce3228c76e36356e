// Copyright 2026 The adaptrag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adaptrag/synthworld.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "adaptrag/errors.h"
#include "adaptrag/prompts.h"
#include "adaptrag/text.h"
#include "json.hpp"

namespace adaptrag {

namespace {

using nlohmann::json;

constexpr std::string_view kHeadquartered = "headquartered_in";
constexpr std::string_view kFounded = "founded_in";
constexpr std::string_view kWorksFor = "works_for";
constexpr std::string_view kBornIn = "born_in";

constexpr std::string_view kNoisePrefix = "Please kindly tell me, in";

// Draws by plain modulo so worlds do not depend on the standard library's
// distribution implementations.
class Draw {
 public:
  explicit Draw(uint64_t seed) : engine_(seed) {}
  size_t Below(size_t n) { return static_cast<size_t>(engine_() % n); }
  size_t Other(size_t n, size_t avoid) {
    const size_t pick = Below(n - 1);
    return pick >= avoid ? pick + 1 : pick;
  }
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::string MakeName(Draw& draw) {
  static constexpr std::string_view kOnsets[] = {
      "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
      "br", "dr", "gr", "kr", "pl", "tr", "st", "sh"};
  static constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u",
                                                 "ai", "ea", "ou"};
  static constexpr std::string_view kCodas[] = {"", "", "n", "r", "l", "s",
                                                "m", "th"};
  std::string name;
  const size_t syllables = 2 + draw.Below(2);
  for (size_t s = 0; s < syllables; ++s) {
    name += kOnsets[draw.Below(std::size(kOnsets))];
    name += kVowels[draw.Below(std::size(kVowels))];
    if (s + 1 == syllables) name += kCodas[draw.Below(std::size(kCodas))];
  }
  name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return name;
}

std::string Filler(Draw& draw) {
  static constexpr std::string_view kFiller[] = {
      "Records were compiled from public registries.",
      "The entry was last reviewed by the archive staff.",
      "Further details are listed in the appendix.",
      "This note belongs to the regional almanac.",
      "Some figures may differ between editions.",
      "Local newspapers covered the topic at length."};
  std::string out;
  const size_t n = draw.Below(3);
  for (size_t i = 0; i < n; ++i) {
    out += ' ';
    out += kFiller[draw.Below(std::size(kFiller))];
  }
  return out;
}

size_t AddFact(SynthWorld& world, std::string subject, std::string_view relation,
               std::string object) {
  world.facts.push_back({std::move(subject), std::string(relation),
                         std::move(object)});
  return world.facts.size() - 1;
}

std::string Join(const std::vector<std::string>& lines) {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

std::string FactSentence(const Fact& fact) {
  if (fact.relation == kHeadquartered) {
    return fact.subject + " is headquartered in " + fact.object + ".";
  }
  if (fact.relation == kFounded) {
    return fact.subject + " was founded in " + fact.object + ".";
  }
  if (fact.relation == kWorksFor) {
    return fact.subject + " works for " + fact.object + ".";
  }
  if (fact.relation == kBornIn) {
    return fact.subject + " was born in " + fact.object + ".";
  }
  throw PreconditionError("unknown relation: " + fact.relation);
}

std::string_view QuestionKindName(QuestionKind kind) {
  switch (kind) {
    case QuestionKind::kSingleHop: return "single_hop";
    case QuestionKind::kNoisySingleHop: return "noisy_single_hop";
    case QuestionKind::kSerial2Hop: return "serial_2hop";
    case QuestionKind::kParallelCompare: return "parallel_compare";
  }
  return "unknown";
}

QuestionKind QuestionKindFromName(std::string_view name) {
  for (const auto kind :
       {QuestionKind::kSingleHop, QuestionKind::kNoisySingleHop,
        QuestionKind::kSerial2Hop, QuestionKind::kParallelCompare}) {
    if (QuestionKindName(kind) == name) return kind;
  }
  throw PreconditionError("unknown question kind: " + std::string(name));
}

SynthWorld GenerateWorld(const WorldOptions& options) {
  if (options.n_entities < 2 || options.n_distractors == 0 ||
      options.n_questions_per_kind == 0) {
    throw PreconditionError(
        "world needs n_entities >= 2 and positive distractor and question "
        "counts");
  }
  Draw draw(options.seed);
  const size_t n = options.n_entities;

  std::set<std::string> used;
  const auto fresh_names = [&](size_t count) {
    std::vector<std::string> names;
    while (names.size() < count) {
      std::string name = MakeName(draw);
      if (used.insert(text::ToLowerAscii(name)).second) names.push_back(name);
    }
    return names;
  };
  const auto persons = fresh_names(n);
  const auto orgs = fresh_names(n);
  const auto cities = fresh_names(n);
  std::vector<size_t> year_pool(std::max<size_t>(200, n));
  for (size_t i = 0; i < year_pool.size(); ++i) year_pool[i] = i;
  draw.Shuffle(year_pool);
  std::vector<std::string> years;
  for (size_t i = 0; i < n; ++i) years.push_back(std::to_string(1801 + year_pool[i]));

  SynthWorld world;
  world.seed = options.seed;
  std::vector<size_t> hq_city(n), employer(n), birth_city(n);
  std::vector<size_t> hq_fact(n), founded_fact(n), works_fact(n), born_fact(n);
  for (size_t o = 0; o < n; ++o) {
    hq_city[o] = draw.Below(n);
    hq_fact[o] = AddFact(world, orgs[o], kHeadquartered, cities[hq_city[o]]);
    founded_fact[o] = AddFact(world, orgs[o], kFounded, years[o]);
  }
  for (size_t p = 0; p < n; ++p) {
    employer[p] = draw.Below(n);
    works_fact[p] = AddFact(world, persons[p], kWorksFor, orgs[employer[p]]);
    birth_city[p] = draw.Below(n);
    born_fact[p] = AddFact(world, persons[p], kBornIn, cities[birth_city[p]]);
  }

  // Corpus: one document per fact, then distractors, then a shuffle.
  struct Draft {
    std::string title;
    std::string text;
    std::optional<size_t> fact;
  };
  std::vector<Draft> drafts;
  for (size_t f = 0; f < world.facts.size(); ++f) {
    drafts.push_back({world.facts[f].subject,
                      FactSentence(world.facts[f]) + Filler(draw), f});
  }
  static constexpr std::string_view kClubs[] = {"charity", "choir", "chess society",
                                               "reading club"};
  for (size_t o = 0; o < n; ++o) {
    for (size_t m = 0; m < options.org_mentions; ++m) {
      const std::string sentence =
          persons[draw.Below(n)] + " founded a " +
          std::string(kClubs[draw.Below(std::size(kClubs))]) +
          " with support from " + orgs[o] + ".";
      drafts.push_back({orgs[o], sentence + Filler(draw), std::nullopt});
    }
  }
  for (size_t d = 0; d < options.n_distractors; ++d) {
    const auto& person = persons[draw.Below(n)];
    const auto& org = orgs[draw.Below(n)];
    const auto& city = cities[draw.Below(n)];
    std::string sentence;
    std::string title;
    switch (draw.Below(4)) {
      case 0:
        sentence = person + " visited " + city + " during a trade fair.";
        title = person;
        break;
      case 1:
        sentence = org + " sponsored a science exhibition in " + city + ".";
        title = org;
        break;
      case 2:
        sentence = person + " wrote an essay about " + org + ".";
        title = person;
        break;
      default:
        sentence = "A documentary about " + city + " was released in " +
                   years[draw.Below(n)] + ".";
        title = city;
        break;
    }
    drafts.push_back({title, sentence + Filler(draw), std::nullopt});
  }
  draw.Shuffle(drafts);
  world.fact_document.assign(world.facts.size(), 0);
  for (size_t i = 0; i < drafts.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "d%04zu", i);
    world.corpus.push_back({id, drafts[i].title, drafts[i].text});
    if (drafts[i].fact) world.fact_document[*drafts[i].fact] = i;
  }

  const size_t per_kind = options.n_questions_per_kind;
  const auto picks = [&](size_t count) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    draw.Shuffle(order);
    std::vector<size_t> out;
    for (size_t i = 0; i < count; ++i) out.push_back(order[i % n]);
    return out;
  };
  const auto single = [](SynthQuestion q) {
    q.sub_questions = {{q.rewrite, q.answer_key}};
    return q;
  };

  for (const size_t o : picks(per_kind)) {
    SynthQuestion q;
    q.kind = QuestionKind::kSingleHop;
    q.text = "Where is " + orgs[o] + " headquartered?";
    q.rewrite = q.text;
    q.answer_key = {cities[hq_city[o]], cities[draw.Other(n, hq_city[o])],
              {hq_fact[o]}, true, ""};
    q.gold_answers = {q.answer_key.gold};
    world.questions.push_back(single(std::move(q)));
  }
  for (const size_t p : picks(per_kind)) {
    SynthQuestion q;
    q.kind = QuestionKind::kNoisySingleHop;
    q.text = std::string(kNoisePrefix) + " which city was " + persons[p] +
             " born?";
    q.rewrite = "In which city was " + persons[p] + " born?";
    q.answer_key = {cities[birth_city[p]], cities[draw.Other(n, birth_city[p])],
              {born_fact[p]}, false, ""};
    q.gold_answers = {q.answer_key.gold};
    world.questions.push_back(single(std::move(q)));
  }
  for (const size_t p : picks(per_kind)) {
    const size_t o = employer[p];
    SynthQuestion q;
    q.kind = QuestionKind::kSerial2Hop;
    q.text = "In which city is the company that employs " + persons[p] +
             " headquartered?";
    q.rewrite = q.text;
    q.answer_key = {cities[hq_city[o]], cities[draw.Other(n, hq_city[o])],
              {works_fact[p], hq_fact[o]}, false, ""};
    q.gold_answers = {q.answer_key.gold};
    q.sub_questions.push_back(
        {"Which company does " + persons[p] + " work for?",
         {orgs[o], orgs[draw.Other(n, o)], {works_fact[p]}, false, ""}});
    q.sub_questions.push_back(
        {"In which city is the employer of " + persons[p] + " headquartered?",
         {q.answer_key.gold, q.answer_key.distractor, {hq_fact[o]}, true,
          "Sub-answer 1: " + orgs[o] + "."}});
    world.questions.push_back(std::move(q));
  }
  const auto first_orgs = picks(per_kind);
  for (const size_t a : first_orgs) {
    const size_t b = draw.Other(n, a);
    const bool a_earlier = std::stoi(years[a]) < std::stoi(years[b]);
    SynthQuestion q;
    q.kind = QuestionKind::kParallelCompare;
    q.text = "Which was founded earlier, " + orgs[a] + " or " + orgs[b] + "?";
    q.rewrite = q.text;
    q.answer_key = {a_earlier ? orgs[a] : orgs[b], a_earlier ? orgs[b] : orgs[a],
              {founded_fact[a], founded_fact[b]}, false, ""};
    q.gold_answers = {q.answer_key.gold};
    for (const size_t x : {a, b}) {
      q.sub_questions.push_back(
          {"When was " + orgs[x] + " founded?",
           {years[x], years[draw.Other(n, x)], {founded_fact[x]}, false, ""}});
    }
    world.questions.push_back(std::move(q));
  }
  return world;
}

namespace {

json AnswerKeyToJson(const AnswerKey& answer_key) {
  return {{"gold", answer_key.gold},
          {"distractor", answer_key.distractor},
          {"support", answer_key.support},
          {"parametric", answer_key.parametric},
          {"known_prefix", answer_key.known_prefix}};
}

AnswerKey AnswerKeyFromJson(const json& j) {
  AnswerKey answer_key;
  answer_key.gold = j.at("gold").get<std::string>();
  answer_key.distractor = j.at("distractor").get<std::string>();
  answer_key.support = j.at("support").get<std::vector<size_t>>();
  answer_key.parametric = j.at("parametric").get<bool>();
  answer_key.known_prefix = j.at("known_prefix").get<std::string>();
  return answer_key;
}

}  // namespace

std::string WorldToJson(const SynthWorld& world) {
  json facts = json::array();
  for (const auto& f : world.facts) {
    facts.push_back({{"subject", f.subject},
                     {"relation", f.relation},
                     {"object", f.object}});
  }
  json corpus = json::array();
  for (const auto& d : world.corpus) {
    corpus.push_back({{"id", d.id}, {"title", d.title}, {"text", d.text}});
  }
  json questions = json::array();
  for (const auto& q : world.questions) {
    json subs = json::array();
    for (const auto& s : q.sub_questions) {
      subs.push_back({{"text", s.text}, {"answer_key", AnswerKeyToJson(s.answer_key)}});
    }
    questions.push_back({{"text", q.text},
                         {"golden_answers", q.gold_answers},
                         {"kind", QuestionKindName(q.kind)},
                         {"answer_key", AnswerKeyToJson(q.answer_key)},
                         {"rewrite", q.rewrite},
                         {"sub_questions", subs}});
  }
  json out = {{"seed", world.seed},
              {"facts", facts},
              {"corpus", corpus},
              {"fact_document", world.fact_document},
              {"questions", questions}};
  return out.dump(2);
}

SynthWorld WorldFromJson(std::string_view text) {
  SynthWorld world;
  try {
    const json j = json::parse(text);
    world.seed = j.at("seed").get<uint64_t>();
    for (const auto& f : j.at("facts")) {
      world.facts.push_back({f.at("subject").get<std::string>(),
                             f.at("relation").get<std::string>(),
                             f.at("object").get<std::string>()});
    }
    for (const auto& d : j.at("corpus")) {
      world.corpus.push_back({d.at("id").get<std::string>(),
                              d.at("title").get<std::string>(),
                              d.at("text").get<std::string>()});
    }
    world.fact_document = j.at("fact_document").get<std::vector<size_t>>();
    for (const auto& qj : j.at("questions")) {
      SynthQuestion q;
      q.text = qj.at("text").get<std::string>();
      q.gold_answers = qj.at("golden_answers").get<std::vector<std::string>>();
      q.kind = QuestionKindFromName(qj.at("kind").get<std::string>());
      q.answer_key = AnswerKeyFromJson(qj.at("answer_key"));
      q.rewrite = qj.at("rewrite").get<std::string>();
      for (const auto& s : qj.at("sub_questions")) {
        q.sub_questions.push_back(
            {s.at("text").get<std::string>(), AnswerKeyFromJson(s.at("answer_key"))});
      }
      world.questions.push_back(std::move(q));
    }
  } catch (const json::exception& e) {
    throw InputError("world", 0, e.what());
  }
  const auto check_support = [&](const AnswerKey& answer_key) {
    for (const size_t f : answer_key.support) {
      if (f >= world.facts.size()) {
        throw InputError("world", 0, "support index out of range");
      }
    }
  };
  if (world.fact_document.size() != world.facts.size()) {
    throw InputError("world", 0, "fact_document size mismatch");
  }
  for (const auto& q : world.questions) {
    check_support(q.answer_key);
    for (const auto& s : q.sub_questions) check_support(s.answer_key);
  }
  return world;
}

SynthWorld LoadWorld(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), 0, "cannot open world file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return WorldFromJson(buffer.str());
}

std::string WorldDatasetJsonl(const SynthWorld& world) {
  std::string out;
  for (const auto& q : world.questions) {
    out += json{{"question", q.text}, {"golden_answers", q.gold_answers}}.dump();
    out += '\n';
  }
  return out;
}

TokenUsage ScriptedUsage(ExecutorId role) {
  switch (role) {
    case ExecutorId::kQDS: return {850, 30};
    case ExecutorId::kQDP: return {940, 30};
    case ExecutorId::kQR: return {840, 20};
    case ExecutorId::kDS: return {2060, 10};
    case ExecutorId::kAG: return {1500, 40};
    case ExecutorId::kAS: return {1400, 40};
    case ExecutorId::kRA: return {0, 0};
  }
  return {};
}

ModelPrice ScriptedPrice() { return {1e-7, 2e-7}; }

ScriptedBackend::ScriptedBackend(const SynthWorld& world) : world_(world) {
  for (size_t i = 0; i < world.questions.size(); ++i) {
    const auto& q = world.questions[i];
    queries_.emplace(q.text, QueryRef{i, std::nullopt});
    queries_.emplace(q.rewrite, QueryRef{i, std::nullopt});
  }
  for (size_t i = 0; i < world.questions.size(); ++i) {
    const auto& subs = world.questions[i].sub_questions;
    for (size_t s = 0; s < subs.size(); ++s) {
      queries_.emplace(subs[s].text, QueryRef{i, s});
    }
  }
}

ScriptedBackend::ParsedPrompt ScriptedBackend::Parse(
    ExecutorId role, std::span<const ChatMessage> prompt) const {
  const ChatMessage* user = nullptr;
  for (const auto& m : prompt) {
    if (m.role == ChatRole::kUser) {
      user = &m;
      break;
    }
  }
  if (user == nullptr) throw ExecutorError("scripted backend: no user message");
  const auto lines = text::SplitLines(user->content);
  std::string first = lines.empty() ? "" : lines[0];
  bool stripped = false;
  for (const std::string_view prefix :
       {"Original question is: ", "Original question is ",
        "Original Question:", "Question is: "}) {
    if (text::StartsWith(first, prefix)) {
      first = first.substr(prefix.size());
      stripped = true;
      break;
    }
  }
  if (!stripped) throw ExecutorError("scripted backend: unrenderable prompt");
  if ((role == ExecutorId::kQDS || role == ExecutorId::kQDP ||
       role == ExecutorId::kQR) &&
      !first.empty() && first.back() == '.') {
    first.pop_back();
  }
  ParsedPrompt parsed;
  constexpr std::string_view kKnown = " Known facts:";
  const size_t known = first.find(kKnown);
  if (known != std::string::npos) {
    parsed.known_facts = first.substr(known + kKnown.size());
    first.resize(known);
  }
  first = text::Trim(first);
  const auto it = queries_.find(first);
  if (it == queries_.end()) {
    throw ExecutorError("scripted backend: unknown question: " + first);
  }
  parsed.ref = it->second;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (text::StartsWith(lines[i], "Document") &&
        lines[i] != prompts::kNoDocuments) {
      parsed.documents += lines[i];
      parsed.documents += '\n';
    }
    constexpr std::string_view kSubAnswer = "Sub-answer ";
    if (text::StartsWith(lines[i], kSubAnswer)) {
      const size_t colon = lines[i].find(':');
      if (colon != std::string::npos) {
        const size_t index =
            std::strtoul(lines[i].c_str() + kSubAnswer.size(), nullptr, 10);
        if (index >= 1) {
          if (parsed.sub_answers.size() < index) parsed.sub_answers.resize(index);
          parsed.sub_answers[index - 1] = text::Trim(lines[i].substr(colon + 1));
        }
      }
    }
  }
  return parsed;
}

const AnswerKey& ScriptedBackend::AnswerKeyOf(const QueryRef& ref) const {
  const auto& q = world_.questions[ref.question];
  return ref.sub_question ? q.sub_questions[*ref.sub_question].answer_key : q.answer_key;
}

std::string ScriptedBackend::Answer(const ParsedPrompt& parsed) const {
  const AnswerKey& answer_key = AnswerKeyOf(parsed.ref);
  const bool has_docs = !parsed.documents.empty();
  if (!has_docs) {
    const bool knows =
        answer_key.parametric && (answer_key.known_prefix.empty() ||
                            parsed.known_facts.find(answer_key.known_prefix) !=
                                std::string::npos);
    return knows ? answer_key.gold : answer_key.distractor;
  }
  for (const size_t f : answer_key.support) {
    if (parsed.documents.find(FactSentence(world_.facts[f])) ==
        std::string::npos) {
      return answer_key.distractor;
    }
  }
  return answer_key.gold;
}

std::string ScriptedBackend::Summarize(const ParsedPrompt& parsed) const {
  const auto& q = world_.questions[parsed.ref.question];
  if (parsed.sub_answers.empty()) return q.answer_key.distractor;
  if (q.kind != QuestionKind::kParallelCompare) return parsed.sub_answers.back();
  if (parsed.sub_answers.size() < 2) return q.answer_key.distractor;
  const auto year = [](const std::string& s) -> std::optional<long> {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') return std::nullopt;
    return v;
  };
  const auto first = year(parsed.sub_answers[0]);
  const auto second = year(parsed.sub_answers[1]);
  if (!first || !second || *first == *second) return q.answer_key.distractor;
  // sub-question order follows the order the two companies are named in
  const bool gold_named_first =
      q.text.find(q.answer_key.gold) < q.text.find(q.answer_key.distractor);
  const bool first_earlier = *first < *second;
  return first_earlier == gold_named_first ? q.answer_key.gold : q.answer_key.distractor;
}

ChatReply ScriptedBackend::Complete(ExecutorId role,
                                    std::span<const ChatMessage> prompt) const {
  if (role == ExecutorId::kRA) {
    throw ExecutorError("scripted backend: RA has no prompt");
  }
  const ParsedPrompt parsed = Parse(role, prompt);
  const auto& q = world_.questions[parsed.ref.question];
  ChatReply reply;
  reply.usage = ScriptedUsage(role);
  switch (role) {
    case ExecutorId::kQDS:
    case ExecutorId::kQDP: {
      std::vector<std::string> lines;
      for (const auto& s : q.sub_questions) lines.push_back(s.text);
      reply.text = Join(lines);
      break;
    }
    case ExecutorId::kQR: {
      // Rewrites strip the noise prefix and keep any known facts.
      const auto& base = parsed.ref.sub_question
                             ? q.sub_questions[*parsed.ref.sub_question].text
                             : q.rewrite;
      reply.text = base;
      if (!parsed.known_facts.empty()) reply.text += " Known facts:" + parsed.known_facts;
      break;
    }
    case ExecutorId::kDS: {
      const AnswerKey& answer_key = AnswerKeyOf(parsed.ref);
      std::vector<std::string> picked;
      const auto doc_lines = text::SplitLines(parsed.documents);
      for (const auto& line : doc_lines) {
        if (line.empty()) continue;
        for (const size_t f : answer_key.support) {
          if (line.find(FactSentence(world_.facts[f])) != std::string::npos) {
            picked.push_back(line.substr(0, line.find('(')));
            break;
          }
        }
      }
      if (picked.empty()) {
        reply.text = "None";
      } else {
        for (size_t i = 0; i < picked.size(); ++i) {
          if (i > 0) reply.text += ',';
          reply.text += picked[i];
        }
      }
      break;
    }
    case ExecutorId::kAG:
      reply.text = "**" + Answer(parsed) + "**";
      break;
    case ExecutorId::kAS:
      reply.text = "**" + Summarize(parsed) + "**";
      break;
    case ExecutorId::kRA:
      break;
  }
  return reply;
}

std::optional<double> ScriptedBackend::PriceUsd(ExecutorId /*role*/,
                                                const TokenUsage& usage) const {
  const ModelPrice price = ScriptedPrice();
  return usage.prompt_tokens * price.input_usd_per_token +
         usage.completion_tokens * price.output_usd_per_token;
}

}  // namespace adaptrag
