#pragma once

#include <string_view>

namespace sgrag {

// Embedded copies of the versioned files under resources/; golden tests pin
// the exact bytes.
std::string_view default_prompt_head();      // prompt_head.v1.txt, trailing newlines stripped
std::string_view grid_cell_synonym_table();  // grid_cell_synonyms.v1.tsv, raw

}  // namespace sgrag
