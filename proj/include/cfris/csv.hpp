// Copyright 2026 The cfris Authors
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cfris {

/// Fixed-format number rendering so reruns are byte-identical.
std::string format_number(double x);

/// Small CSV builder. The first line is a comment carrying the resolved config
/// hash and master seed, followed by the header row.
class CsvTable {
 public:
  CsvTable(std::string config_hash, std::uint64_t seed, std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  /// Writes atomically: a temporary file renamed over the destination.
  void write(const std::string& path) const;

 private:
  std::string hash_;
  std::uint64_t seed_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace cfris
