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

#include "ametk/utf8.hpp"

#include <random>

#include "doctest.h"

using namespace ametk;

TEST_CASE("utf8 decode/encode round trip") {
  const std::string mixed = "ሰላም hello ዓለም 123 \xF0\x9F\x8C\x8D";
  CHECK(utf8::encode(utf8::decode(mixed)) == mixed);
  CHECK(utf8::decode("").empty());
  CHECK(utf8::encode(U"") == "");
}

TEST_CASE("utf8 decode handles Ethiopic code points") {
  const std::u32string cps = utf8::decode("ሀሰአጸ");
  REQUIRE(cps.size() == 4);
  CHECK(cps[0] == 0x1200);
  CHECK(cps[1] == 0x1230);
  CHECK(cps[2] == 0x12A0);
  CHECK(cps[3] == 0x1338);
}

TEST_CASE("utf8 invalid bytes become replacement chars") {
  const std::u32string cps = utf8::decode("a\xFF\xC0 b");
  REQUIRE(cps.size() == 5);
  CHECK(cps[0] == U'a');
  CHECK(cps[1] == utf8::kReplacementChar);
  CHECK(cps[2] == utf8::kReplacementChar);
  // Truncated multi-byte sequence at end of string.
  CHECK(utf8::decode("\xE1\x88").size() == 1);
  // Overlong encoding rejected.
  CHECK(utf8::decode("\xC0\x80")[0] == utf8::kReplacementChar);
}

TEST_CASE("utf8 length counts code points") {
  CHECK(utf8::length("") == 0);
  CHECK(utf8::length("abc") == 3);
  CHECK(utf8::length("ሰላም") == 3);
  CHECK(utf8::length("ሰላም hi") == 6);
}

TEST_CASE("utf8 split_words") {
  CHECK(utf8::split_words("") == std::vector<std::string>{});
  CHECK(utf8::split_words("  ") == std::vector<std::string>{});
  CHECK(utf8::split_words("a b") == std::vector<std::string>{"a", "b"});
  CHECK(utf8::split_words(" ሰላም \t ዓለም \n") ==
        std::vector<std::string>{"ሰላም", "ዓለም"});
  // NBSP is whitespace too.
  CHECK(utf8::split_words("a\xC2\xA0z") == std::vector<std::string>{"a", "z"});
}

TEST_CASE("utf8 normalize_whitespace collapses and trims") {
  CHECK(utf8::normalize_whitespace("") == "");
  CHECK(utf8::normalize_whitespace("   ") == "");
  CHECK(utf8::normalize_whitespace("a  b\t c ") == "a b c");
  CHECK(utf8::normalize_whitespace(" ሰላም  ዓለም ") == "ሰላም ዓለም");
}

TEST_CASE("utf8 normalize_whitespace is idempotent") {
  std::mt19937 rng(7);
  const char32_t pool[] = {U'a', U'b', U' ', U'\t', 0x1200, 0x1230, 0x3000};
  for (int i = 0; i < 500; ++i) {
    std::u32string s;
    const int len = static_cast<int>(rng() % 20);
    for (int k = 0; k < len; ++k) s.push_back(pool[rng() % std::size(pool)]);
    const std::string once = utf8::normalize_whitespace(utf8::encode(s));
    CHECK(utf8::normalize_whitespace(once) == once);
  }
}
