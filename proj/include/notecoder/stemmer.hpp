#pragma once

#include <string>
#include <string_view>

namespace notecoder {

/// Snowball English (Porter2) stemmer.
///
/// Input is expected in lowercase ASCII; apostrophes are handled as in the
/// reference algorithm. Tokens that contain '_' (merged collocations) or any
/// uppercase letter (mapped tokens such as NEGEX) are returned unchanged.
std::string stem(std::string_view word);

}  // namespace notecoder
