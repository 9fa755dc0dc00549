/* Copyright 2026 The osvlm Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef OSV_IO_UTIL_HPP_
#define OSV_IO_UTIL_HPP_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace osv {

// Writes through a temporary sibling file and renames it into place, so
// readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);
void write_text_atomic(const std::filesystem::path& path,
                       std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

// Shortest "%.9g" rendering; all report floats go through this.
std::string format_sig9(double value);
// The double nearest to the 9-significant-digit decimal rendering of value.
double round_sig9(double value);

// Warnings go to stderr as "warning: ..." unless silenced.
void log_warning(std::string_view message);
void set_warnings_enabled(bool enabled);

}  // namespace osv

#endif  // OSV_IO_UTIL_HPP_
