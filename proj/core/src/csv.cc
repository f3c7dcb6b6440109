// Copyright 2026 The CFL Authors.
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

#include "cfl/csv.h"

#include <istream>
#include <ostream>

#include "cfl/error.h"

namespace cfl {
namespace {

std::string_view TrimBlank(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

bool QuotesBalanced(std::string_view text) {
  bool in_quotes = false;
  for (char ch : text) {
    if (ch == '"') in_quotes = !in_quotes;
  }
  return !in_quotes;
}

}  // namespace

CsvReader::CsvReader(std::istream& in, CsvOptions options)
    : in_(in), options_(options), delimiter_(options.delimiter) {
  if (delimiter_ != 0) return;
  // Peek at the first line to pick the delimiter.
  std::string first;
  if (std::getline(in_, first)) {
    pending_ = first;
    have_pending_ = true;
  }
  const bool has_semicolon = first.find(';') != std::string::npos;
  const bool has_comma = first.find(',') != std::string::npos;
  delimiter_ = (has_semicolon && !has_comma) ? ';' : ',';
}

bool CsvReader::Next(std::vector<std::string>& record) {
  std::string text;
  while (true) {
    std::string line;
    if (have_pending_) {
      line = std::move(pending_);
      have_pending_ = false;
    } else if (!std::getline(in_, line)) {
      if (!text.empty()) {
        throw Error(ErrorCode::kParseError,
                    "unterminated quoted field at line " + std::to_string(line_));
      }
      return false;
    }
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text.empty() && line.empty()) continue;
    if (!text.empty()) text += '\n';
    text += line;
    if (QuotesBalanced(text)) break;
  }
  return ReadRecord(text, record);
}

bool CsvReader::ReadRecord(std::string_view text,
                           std::vector<std::string>& record) {
  record.clear();
  std::string field;
  bool quoted = false;
  bool in_quotes = false;
  auto finish = [&] {
    if (!quoted && options_.trim) {
      record.emplace_back(TrimBlank(field));
    } else {
      record.push_back(field);
    }
    field.clear();
    quoted = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      if (!TrimBlank(field).empty()) {
        throw Error(ErrorCode::kParseError,
                    "stray quote at line " + std::to_string(line_));
      }
      field.clear();
      in_quotes = true;
      quoted = true;
    } else if (ch == delimiter_) {
      finish();
    } else if (quoted) {
      if (ch != ' ' && ch != '\t') {
        throw Error(ErrorCode::kParseError,
                    "text after closing quote at line " + std::to_string(line_));
      }
    } else {
      field += ch;
    }
  }
  finish();
  return true;
}

void WriteCsvRecord(std::ostream& out, const std::vector<std::string>& fields,
                    char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    const std::string& f = fields[i];
    const bool needs_quotes =
        f.find_first_of(std::string("\"\n\r") + delimiter) != std::string::npos ||
        (!f.empty() && (f.front() == ' ' || f.back() == ' '));
    if (!needs_quotes) {
      out << f;
      continue;
    }
    out << '"';
    for (char ch : f) {
      if (ch == '"') out << '"';
      out << ch;
    }
    out << '"';
  }
  out << '\n';
}

}  // namespace cfl
