// Copyright 2026 The ametk Authors
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

// UTF-8 <-> code point helpers used across the toolkit. All text enters and
// leaves as UTF-8 std::string; processing that needs character identity works
// on char32_t sequences.

#ifndef AMETK_UTF8_HPP_
#define AMETK_UTF8_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ametk::utf8 {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes UTF-8; invalid byte sequences become U+FFFD (one per bad byte).
std::u32string decode(std::string_view s);

std::string encode(std::u32string_view cps);

// Appends one code point to a UTF-8 buffer.
void append(char32_t cp, std::string& out);

// Number of code points in the string.
std::size_t length(std::string_view s);

// Whitespace per this toolkit: ASCII space/tab/CR/LF/VT/FF plus the common
// Unicode space separators (NBSP, U+2000..U+200A, line/para separators,
// narrow NBSP, math space, ideographic space).
bool is_space(char32_t cp);

// Splits on whitespace runs; empty tokens never appear.
std::vector<std::string> split_words(std::string_view s);

// Collapses whitespace runs to single ASCII spaces and trims both ends.
std::string normalize_whitespace(std::string_view s);

}  // namespace ametk::utf8

#endif  // AMETK_UTF8_HPP_
