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

#ifndef ADAPTRAG_CORPUS_INDEX_H_
#define ADAPTRAG_CORPUS_INDEX_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adaptrag {

struct Document {
  std::string id;
  std::string title;
  std::string text;

  bool operator==(const Document&) const = default;
};

// Lowercased runs of alphanumeric code points, in input order.
std::vector<std::string> TokenizeForIndex(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Posting {
  uint32_t doc = 0;  // ordinal into the corpus
  uint32_t term_frequency = 0;

  bool operator==(const Posting&) const = default;
};

struct ScoredHit {
  const Document* doc = nullptr;
  double score = 0.0;
};

// Immutable BM25 inverted index. Thread-safe for concurrent Search() calls.
class CorpusIndex {
 public:
  // Throws PreconditionError on an empty corpus, duplicate ids, empty text,
  // or out-of-range parameters.
  static CorpusIndex Build(std::vector<Document> docs, Bm25Params params = {});

  // At most k hits with a positive score, ordered by descending score and
  // then ascending document id. Requires k >= 1.
  std::vector<ScoredHit> Search(std::string_view query, size_t k) const;

  // BM25 idf: ln((N - n + 0.5) / (n + 0.5) + 1).
  double Idf(std::string_view term) const;

  const std::vector<Document>& documents() const { return docs_; }
  const std::vector<uint32_t>& doc_lengths() const { return doc_lengths_; }
  const std::vector<Posting>* postings(std::string_view term) const;
  size_t doc_count() const { return docs_.size(); }
  size_t term_count() const { return postings_.size(); }
  double avg_doc_length() const { return avg_doc_length_; }
  const Bm25Params& params() const { return params_; }

 private:
  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  CorpusIndex() = default;

  std::vector<Document> docs_;
  std::vector<uint32_t> doc_lengths_;
  std::unordered_map<std::string, std::vector<Posting>, StringHash,
                     std::equal_to<>>
      postings_;
  double avg_doc_length_ = 0.0;
  Bm25Params params_;
};

// Reads a corpus in JSONL form, one {"id", "title", "text"} object per line.
// Blank lines are skipped; any malformed line throws InputError.
std::vector<Document> LoadCorpusJsonl(const std::filesystem::path& path);
std::vector<Document> ParseCorpusJsonl(std::string_view content,
                                       const std::string& source = "corpus");
std::string CorpusToJsonl(std::span<const Document> docs);

}  // namespace adaptrag

#endif  // ADAPTRAG_CORPUS_INDEX_H_
