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

#include "cfl/schema.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cfl/error.h"

namespace cfl {
namespace {

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

FeatureKind ParseKind(std::string_view v, std::size_t line) {
  if (v == "quantitative") return FeatureKind::kQuantitative;
  if (v == "binary") return FeatureKind::kBinary;
  if (v == "categorical") return FeatureKind::kCategorical;
  throw Error(ErrorCode::kConfig, "schema line " + std::to_string(line) +
                                      ": unknown kind '" + std::string(v) + "'");
}

FeatureRole ParseRole(std::string_view v, std::size_t line) {
  if (v == "of") return FeatureRole::kOrdinary;
  if (v == "cf") return FeatureRole::kComplementary;
  if (v == "label") return FeatureRole::kLabel;
  throw Error(ErrorCode::kConfig, "schema line " + std::to_string(line) +
                                      ": unknown role '" + std::string(v) + "'");
}

}  // namespace

std::string_view KindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kQuantitative: return "quantitative";
    case FeatureKind::kBinary: return "binary";
    case FeatureKind::kCategorical: return "categorical";
  }
  return "";
}

std::string_view RoleName(FeatureRole role) {
  switch (role) {
    case FeatureRole::kOrdinary: return "of";
    case FeatureRole::kComplementary: return "cf";
    case FeatureRole::kLabel: return "label";
  }
  return "";
}

int ColumnSpec::CodeOf(std::string_view value) const {
  for (std::size_t i = 0; i < vocabulary.size(); ++i) {
    if (vocabulary[i] == value) return static_cast<int>(i) + 1;
  }
  return 0;
}

FeatureSchema::FeatureSchema(std::vector<ColumnSpec> columns)
    : columns_(std::move(columns)) {
  Index();
}

void FeatureSchema::Index() {
  of_.clear();
  cf_.clear();
  std::size_t labels = 0;
  std::set<std::string> names;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const ColumnSpec& c = columns_[i];
    if (!names.insert(c.name).second) {
      throw Error(ErrorCode::kConfig, "duplicate column '" + c.name + "'");
    }
    switch (c.role) {
      case FeatureRole::kOrdinary: of_.push_back(i); break;
      case FeatureRole::kComplementary:
        if (c.kind != FeatureKind::kCategorical) {
          throw Error(ErrorCode::kConfig,
                      "complementary column '" + c.name + "' must be categorical");
        }
        cf_.push_back(i);
        break;
      case FeatureRole::kLabel:
        if (c.kind == FeatureKind::kQuantitative) {
          throw Error(ErrorCode::kConfig,
                      "label column '" + c.name + "' must be qualitative");
        }
        label_ = i;
        ++labels;
        break;
    }
    std::set<std::string> vocab(c.vocabulary.begin(), c.vocabulary.end());
    if (vocab.size() != c.vocabulary.size()) {
      throw Error(ErrorCode::kConfig,
                  "vocabulary of '" + c.name + "' has duplicate entries");
    }
    if (c.kind == FeatureKind::kQuantitative && !c.vocabulary.empty()) {
      throw Error(ErrorCode::kConfig,
                  "quantitative column '" + c.name + "' has a vocabulary");
    }
  }
  if (labels != 1) {
    throw Error(ErrorCode::kConfig,
                "schema needs exactly one label column, found " +
                    std::to_string(labels));
  }
}

bool FeatureSchema::VocabulariesComplete() const {
  return std::all_of(columns_.begin(), columns_.end(), [](const ColumnSpec& c) {
    return c.kind == FeatureKind::kQuantitative || !c.vocabulary.empty();
  });
}

void FeatureSchema::Validate() const {
  for (const ColumnSpec& c : columns_) {
    if (c.kind == FeatureKind::kQuantitative) continue;
    if (c.vocabulary.empty()) {
      throw Error(ErrorCode::kConfig, "column '" + c.name + "' has no vocabulary");
    }
    if (c.kind == FeatureKind::kBinary && c.cardinality() != 2) {
      throw Error(ErrorCode::kConfig, "binary column '" + c.name +
                                          "' needs exactly 2 categories");
    }
    if (c.role == FeatureRole::kComplementary && c.cardinality() < 3) {
      throw Error(ErrorCode::kConfig, "complementary column '" + c.name +
                                          "' needs at least 3 categories");
    }
    if (c.role == FeatureRole::kLabel && c.cardinality() < 2) {
      throw Error(ErrorCode::kConfig,
                  "label column '" + c.name + "' needs at least 2 categories");
    }
  }
}

void FeatureSchema::SetVocabulary(std::size_t column,
                                  std::vector<std::string> vocabulary) {
  columns_.at(column).vocabulary = std::move(vocabulary);
  Index();
}

std::optional<std::size_t> FeatureSchema::Find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

FeatureSchema FeatureSchema::Parse(std::string_view text) {
  std::vector<ColumnSpec> columns;
  std::vector<bool> has_kind;
  std::vector<bool> has_role;
  auto column_for = [&](std::string_view name) -> std::size_t {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].name == name) return i;
    }
    ColumnSpec spec;
    spec.name = std::string(name);
    columns.push_back(std::move(spec));
    has_kind.push_back(false);
    has_role.push_back(false);
    return columns.size() - 1;
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kConfig,
                  "schema line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    const auto dot = key.rfind('.');
    if (dot == std::string_view::npos || dot == 0) {
      throw Error(ErrorCode::kConfig, "schema line " + std::to_string(line_no) +
                                          ": key must be <column>.<field>");
    }
    const std::string_view field = key.substr(dot + 1);
    const std::size_t c = column_for(key.substr(0, dot));
    if (field == "kind") {
      columns[c].kind = ParseKind(value, line_no);
      has_kind[c] = true;
    } else if (field == "role") {
      columns[c].role = ParseRole(value, line_no);
      has_role[c] = true;
    } else if (field == "vocabulary") {
      columns[c].vocabulary.clear();
      std::size_t start = 0;
      while (start <= value.size()) {
        const std::size_t bar = std::min(value.find('|', start), value.size());
        const std::string_view item = Trim(value.substr(start, bar - start));
        if (item.empty()) {
          throw Error(ErrorCode::kConfig, "schema line " +
                                              std::to_string(line_no) +
                                              ": empty vocabulary entry");
        }
        columns[c].vocabulary.emplace_back(item);
        start = bar + 1;
      }
    } else {
      throw Error(ErrorCode::kConfig, "schema line " + std::to_string(line_no) +
                                          ": unknown field '" +
                                          std::string(field) + "'");
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (!has_kind[i] || !has_role[i]) {
      throw Error(ErrorCode::kConfig,
                  "column '" + columns[i].name + "' needs both kind and role");
    }
  }
  return FeatureSchema(std::move(columns));
}

FeatureSchema FeatureSchema::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open schema " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

std::string FeatureSchema::ToText() const {
  std::ostringstream out;
  for (const ColumnSpec& c : columns_) {
    out << c.name << ".kind = " << KindName(c.kind) << "\n";
    out << c.name << ".role = " << RoleName(c.role) << "\n";
    if (!c.vocabulary.empty()) {
      out << c.name << ".vocabulary = ";
      for (std::size_t i = 0; i < c.vocabulary.size(); ++i) {
        if (i) out << '|';
        out << c.vocabulary[i];
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace cfl
