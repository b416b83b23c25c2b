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

#include "aeromamba/errors.hpp"

#include <fmt/format.h>

namespace aeromamba {

FormatError::FormatError(const std::string& what, std::size_t offset)
    : Error(fmt::format("{} (at byte offset {})", what, offset)),
      offset_(offset) {}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ArgumentError*>(&e) != nullptr) return 2;
  if (dynamic_cast<const IoError*>(&e) != nullptr ||
      dynamic_cast<const FormatError*>(&e) != nullptr ||
      dynamic_cast<const UnsupportedFormatError*>(&e) != nullptr) {
    return 3;
  }
  return 4;
}

}  // namespace aeromamba
