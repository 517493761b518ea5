#pragma once

#include <map>
#include <string>

namespace corpusforge {

// One corpus record. Immutable by convention once constructed; stages copy
// rather than mutate so documents can be handed between threads freely.
struct Document {
    std::string id;
    std::string source;
    std::string category;
    std::string lang;  // "en" | "zh" | "other"
    std::string text;
    std::map<std::string, std::string> meta;
};

// Throws Error(Data) if id/source are empty or text is not valid UTF-8.
void validate(const Document& doc);

}  // namespace corpusforge
