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
#ifndef AEROMAMBA_UTIL_CSV_HPP_
#define AEROMAMBA_UTIL_CSV_HPP_

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace aeromamba::util {

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_number(double v);

// Line-oriented CSV writer. Fields are written verbatim (no quoting); the
// schemas used here never contain commas.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path,
            std::initializer_list<std::string_view> header);

  void row(const std::vector<std::string>& fields);
  void flush();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace aeromamba::util

#endif  // AEROMAMBA_UTIL_CSV_HPP_
