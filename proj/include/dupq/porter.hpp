#pragma once

#include <string>
#include <string_view>

namespace dupq {

// Suffix-stripping stemmer for lowercase English words, following the
// published 1980 rule tables. Words shorter than three letters or
// containing anything outside a-z are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace dupq
