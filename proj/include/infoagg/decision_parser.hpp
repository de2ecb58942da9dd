#pragma once

#include <stdexcept>
#include <string_view>

#include "infoagg/types.hpp"

namespace infoagg {

class ParseFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Extracts the first well-formed JSON object from a model reply (surrounding
// prose and code fences are ignored) and maps it onto a Decision. The
// instrument id selects the side; a "side" field of "yes"/"no" is also
// accepted. Throws ParseFailure.
Decision parse_decision(std::string_view text, const InstrumentIds& instruments);

} // namespace infoagg
