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

#ifndef CFL_CSV_H_
#define CFL_CSV_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cfl {

struct CsvOptions {
  // 0 selects automatically from the header line: ';' when it contains ';'
  // and no ',', otherwise ','.
  char delimiter = 0;
  // Strip spaces and tabs around unquoted fields (UCI files pad values).
  bool trim = true;
};

// RFC-4180 reader: quoted fields, doubled quotes, embedded delimiters and
// newlines. Records are returned in file order; blank lines are skipped.
class CsvReader {
 public:
  CsvReader(std::istream& in, CsvOptions options = {});

  // Returns false at end of input.
  bool Next(std::vector<std::string>& record);
  std::size_t line() const { return line_; }
  char delimiter() const { return delimiter_; }

 private:
  bool ReadRecord(std::string_view text, std::vector<std::string>& record);

  std::istream& in_;
  CsvOptions options_;
  char delimiter_;
  std::size_t line_ = 0;
  std::string pending_;
  bool have_pending_ = false;
};

void WriteCsvRecord(std::ostream& out, const std::vector<std::string>& fields,
                    char delimiter = ',');

}  // namespace cfl

#endif  // CFL_CSV_H_
