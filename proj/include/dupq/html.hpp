#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dupq {

// Decomposition of a question body: markup-free prose, the code block
// contents, and the image URLs, split exactly once at ingestion so
// every downstream feature sees the same view.
struct BodyParts {
  std::string body_text;                 // entity-decoded, whitespace-collapsed
  std::vector<std::string> code_blocks;  // <code>/<pre> contents, document order
  std::vector<std::string> image_refs;   // <img src="...">, document order
};

// Lenient HTML scan. <pre>/<code> (nested pairs collapse into one
// block) feed code_blocks, <img src> feeds image_refs, all other tags
// act as word separators, text nodes are entity-decoded. Never throws;
// unterminated markup is treated as text.
BodyParts decompose_body_html(std::string_view html);

}  // namespace dupq
