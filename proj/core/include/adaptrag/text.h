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

#ifndef ADAPTRAG_TEXT_H_
#define ADAPTRAG_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the retrieval tokenizer and answer normalization.
namespace adaptrag::text {

// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD.
std::u32string DecodeUtf8(std::string_view input);
void AppendUtf8(char32_t cp, std::string& out);

// Letters and digits. Non-ASCII code points count as alphanumeric unless they
// fall in a punctuation, symbol, or separator block.
bool IsAlnum(char32_t cp);
char32_t ToLower(char32_t cp);

std::string Trim(std::string_view s);
std::vector<std::string> SplitLines(std::string_view s);
std::string ToLowerAscii(std::string_view s);
bool StartsWith(std::string_view s, std::string_view prefix);

}  // namespace adaptrag::text

#endif  // ADAPTRAG_TEXT_H_
