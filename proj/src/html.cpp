#include "dupq/html.hpp"

#include <cctype>

#include "dupq/util.hpp"
#include "dupq/xml_rows.hpp"

namespace dupq {

namespace {

struct Tag {
  std::string name;        // lowercase
  bool closing = false;
  std::string src;         // <img> only
  std::size_t end = 0;     // index just past '>'
};

// Parse the tag starting at html[pos] == '<'. Returns false if it does
// not look like a tag (treat '<' as text then).
bool parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
  std::size_t i = pos + 1;
  if (i >= html.size()) return false;
  if (html[i] == '/') {
    tag.closing = true;
    ++i;
  }
  std::size_t name_start = i;
  while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) ||
                             html[i] == '-' || html[i] == ':')) {
    ++i;
  }
  if (i == name_start) return false;
  tag.name = to_lower_ascii(html.substr(name_start, i - name_start));

  // Attributes; we only ever care about img/src.
  while (i < html.size() && html[i] != '>') {
    if (std::isspace(static_cast<unsigned char>(html[i])) || html[i] == '/') {
      ++i;
      continue;
    }
    std::size_t attr_start = i;
    while (i < html.size() && html[i] != '=' && html[i] != '>' && html[i] != '/' &&
           !std::isspace(static_cast<unsigned char>(html[i]))) {
      ++i;
    }
    std::string attr_name = to_lower_ascii(html.substr(attr_start, i - attr_start));
    while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
    std::string value;
    if (i < html.size() && html[i] == '=') {
      ++i;
      while (i < html.size() && std::isspace(static_cast<unsigned char>(html[i]))) ++i;
      if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
        char q = html[i++];
        std::size_t v_start = i;
        while (i < html.size() && html[i] != q) ++i;
        value = std::string(html.substr(v_start, i - v_start));
        if (i < html.size()) ++i;
      } else {
        std::size_t v_start = i;
        while (i < html.size() && html[i] != '>' &&
               !std::isspace(static_cast<unsigned char>(html[i]))) {
          ++i;
        }
        value = std::string(html.substr(v_start, i - v_start));
      }
    }
    if (attr_name == "src") tag.src = decode_entities(value);
  }
  if (i >= html.size()) return false;  // unterminated
  tag.end = i + 1;
  return true;
}

bool is_code_container(const std::string& name) {
  return name == "code" || name == "pre";
}

}  // namespace

BodyParts decompose_body_html(std::string_view html) {
  BodyParts parts;
  std::string text_raw;
  std::string code_raw;
  int code_depth = 0;

  auto flush_code = [&] {
    std::string decoded = decode_entities(code_raw);
    if (!decoded.empty()) parts.code_blocks.push_back(std::move(decoded));
    code_raw.clear();
  };

  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] == '<') {
      if (html.compare(i, 4, "<!--") == 0) {
        std::size_t end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      Tag tag;
      if (parse_tag(html, i, tag)) {
        if (tag.name == "img" && !tag.closing) {
          if (!tag.src.empty()) parts.image_refs.push_back(tag.src);
        } else if (is_code_container(tag.name)) {
          if (!tag.closing) {
            ++code_depth;
          } else if (code_depth > 0) {
            if (--code_depth == 0) flush_code();
          }
        } else if (code_depth == 0) {
          text_raw.push_back(' ');  // tags separate words
        }
        i = tag.end;
        continue;
      }
      // Not a tag; fall through and treat '<' as literal text.
    }
    if (code_depth > 0) {
      code_raw.push_back(html[i]);
    } else {
      text_raw.push_back(html[i]);
    }
    ++i;
  }
  if (code_depth > 0) flush_code();  // unterminated code block

  parts.body_text = collapse_whitespace(decode_entities(text_raw));
  return parts;
}

}  // namespace dupq
