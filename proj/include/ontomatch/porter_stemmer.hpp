#pragma once

#include <string>
#include <string_view>

namespace ontomatch {

// Porter (1980) suffix-stripping stemmer, following the reference C
// implementation. Expects a lowercase token; words of one or two characters
// and tokens containing non-ASCII bytes are returned unchanged.
std::string porter_stem(std::string_view token);

}  // namespace ontomatch
