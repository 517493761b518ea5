#include "corpusforge/document.hpp"

#include "corpusforge/error.hpp"
#include "corpusforge/text.hpp"

namespace corpusforge {

void validate(const Document& doc) {
    if (doc.id.empty()) fail_data("document has empty id");
    if (doc.source.empty()) fail_data("document '" + doc.id + "' has empty source");
    if (!is_valid_utf8(doc.text)) fail_data("document '" + doc.id + "' text is not valid UTF-8");
}

}  // namespace corpusforge
