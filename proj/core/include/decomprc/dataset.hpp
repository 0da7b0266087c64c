// Copyright 2026 The DecompRC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "decomprc/types.hpp"

namespace decomprc {

/// Reads a HotpotQA-format JSON array. Records without `context` load with
/// no paragraphs (full-wiki mode). Throws ParseError naming the offending
/// record id.
std::vector<QAExample> load_dataset(const std::filesystem::path& path);
std::vector<QAExample> parse_dataset(std::string_view json_text);

/// Writes examples back in the same format.
void write_dataset(std::ostream& out, const std::vector<QAExample>& examples);
void write_dataset(const std::filesystem::path& path, const std::vector<QAExample>& examples);

/// Corpus file: one {"title", "sentences"} object per line.
std::vector<Paragraph> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const std::vector<Paragraph>& corpus);

/// Prediction file: a JSON object mapping `_id` to answer string.
std::map<std::string, std::string> load_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, const std::map<std::string, std::string>& predictions);

std::string_view to_string(HotpotType t);
std::string_view to_string(Level l);

}  // namespace decomprc
