// Built-in lexicon JSON (compiled in from data/default_lexicon.json).
#pragma once

namespace semnet {

extern const char* const kDefaultLexiconJson;

}  // namespace semnet
