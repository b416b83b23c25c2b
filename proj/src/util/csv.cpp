// Copyright 2026 The aeromamba Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "aeromamba/util/csv.hpp"

#include <sstream>

#include <fmt/format.h>

#include "aeromamba/errors.hpp"

namespace aeromamba::util {

std::string format_number(double v) { return fmt::format("{}", v); }

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(path, std::ios::trunc), path_(path) {
  if (!out_) throw IoError(fmt::format("cannot write {}", path.string()));
  out_ << fmt::format("{}\n", fmt::join(header, ","));
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  out_ << fmt::format("{}\n", fmt::join(fields, ","));
  if (!out_) throw IoError(fmt::format("write failed on {}", path_.string()));
}

void CsvWriter::flush() { out_.flush(); }

std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace aeromamba::util
