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

#include "adaptrag/corpus_index.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "adaptrag/errors.h"
#include "adaptrag/text.h"
#include "json.hpp"

namespace adaptrag {

std::vector<std::string> TokenizeForIndex(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char32_t cp : text::DecodeUtf8(text)) {
    if (text::IsAlnum(cp)) {
      text::AppendUtf8(text::ToLower(cp), current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

CorpusIndex CorpusIndex::Build(std::vector<Document> docs, Bm25Params params) {
  if (docs.empty()) throw PreconditionError("empty corpus");
  if (!(params.k1 > 0.0)) throw PreconditionError("bm25 k1 must be > 0");
  if (!(params.b >= 0.0 && params.b <= 1.0)) {
    throw PreconditionError("bm25 b must lie in [0, 1]");
  }

  std::set<std::string_view> seen;
  for (const auto& doc : docs) {
    if (!seen.insert(doc.id).second) {
      throw PreconditionError("duplicate document id: " + doc.id);
    }
    if (doc.text.empty()) {
      throw PreconditionError("document has empty text: " + doc.id);
    }
  }

  CorpusIndex index;
  index.params_ = params;
  index.docs_ = std::move(docs);
  index.doc_lengths_.reserve(index.docs_.size());

  uint64_t total_length = 0;
  for (uint32_t ordinal = 0; ordinal < index.docs_.size(); ++ordinal) {
    const auto tokens = TokenizeForIndex(index.docs_[ordinal].text);
    // std::map keeps posting construction independent of hash order.
    std::map<std::string_view, uint32_t> counts;
    for (const auto& token : tokens) ++counts[token];
    for (const auto& [term, tf] : counts) {
      auto it = index.postings_.find(term);
      if (it == index.postings_.end()) {
        it = index.postings_.emplace(std::string(term), std::vector<Posting>{})
                 .first;
      }
      it->second.push_back({ordinal, tf});
    }
    index.doc_lengths_.push_back(static_cast<uint32_t>(tokens.size()));
    total_length += tokens.size();
  }
  index.avg_doc_length_ =
      static_cast<double>(total_length) / index.docs_.size();
  return index;
}

const std::vector<Posting>* CorpusIndex::postings(std::string_view term) const {
  const auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

double CorpusIndex::Idf(std::string_view term) const {
  const auto* list = postings(term);
  const double n = list ? static_cast<double>(list->size()) : 0.0;
  const double total = static_cast<double>(docs_.size());
  return std::log((total - n + 0.5) / (n + 0.5) + 1.0);
}

std::vector<ScoredHit> CorpusIndex::Search(std::string_view query,
                                           size_t k) const {
  if (k == 0) throw PreconditionError("search requires k >= 1");

  auto terms = TokenizeForIndex(query);
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

  // Dense accumulator; corpora here are small enough that this beats a map.
  std::vector<double> scores(docs_.size(), 0.0);
  std::vector<uint32_t> touched;
  const double avg = avg_doc_length_ > 0.0 ? avg_doc_length_ : 1.0;
  for (const auto& term : terms) {
    const auto* list = postings(term);
    if (list == nullptr) continue;
    const double idf = Idf(term);
    for (const auto& posting : *list) {
      const double tf = posting.term_frequency;
      const double norm =
          1.0 - params_.b + params_.b * doc_lengths_[posting.doc] / avg;
      if (scores[posting.doc] == 0.0) touched.push_back(posting.doc);
      scores[posting.doc] +=
          idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
    }
  }

  std::vector<ScoredHit> hits;
  hits.reserve(touched.size());
  for (const uint32_t ordinal : touched) {
    if (scores[ordinal] > 0.0) hits.push_back({&docs_[ordinal], scores[ordinal]});
  }
  const auto better = [](const ScoredHit& a, const ScoredHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc->id < b.doc->id;
  };
  if (hits.size() > k) {
    std::partial_sort(hits.begin(), hits.begin() + k, hits.end(), better);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), better);
  }
  return hits;
}

std::vector<Document> ParseCorpusJsonl(std::string_view content,
                                       const std::string& source) {
  std::vector<Document> docs;
  int line_number = 0;
  for (const auto& line : text::SplitLines(content)) {
    ++line_number;
    if (text::Trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(source, line_number, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) {
      throw InputError(source, line_number, "expected a JSON object");
    }
    Document doc;
    for (const char* field : {"id", "title", "text"}) {
      if (!record.contains(field) || !record[field].is_string()) {
        throw InputError(source, line_number,
                         std::string("missing string field '") + field + "'");
      }
    }
    doc.id = record["id"].get<std::string>();
    doc.title = record["title"].get<std::string>();
    doc.text = record["text"].get<std::string>();
    if (doc.text.empty()) {
      throw InputError(source, line_number, "empty document text");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> LoadCorpusJsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCorpusJsonl(buffer.str(), path.string());
}

std::string CorpusToJsonl(std::span<const Document> docs) {
  std::string out;
  for (const auto& doc : docs) {
    const nlohmann::json record = {
        {"id", doc.id}, {"title", doc.title}, {"text", doc.text}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

}  // namespace adaptrag
