// Copyright 2026 The adiab Authors
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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace adiab::report {

/// Shortest round-trip decimal form, locale independent ("nan", "inf" for
/// non-finite values).
std::string format_double(double x);

/// Joins cells with ',' and terminates with '\n'.
std::string csv_line(const std::vector<std::string>& cells);

/// Writes text with LF line endings exactly as given.
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace adiab::report
