#include "dupq/xml_rows.hpp"

#include <cctype>
#include <sstream>

#include "dupq/errors.hpp"

namespace dupq {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp <= 0x7F) {
    out.push_back(static_cast<char>(cp));
  } else if (cp <= 0x7FF) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0xFFFF) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0x10FFFF) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Character-level cursor over the whole document, tracking the byte
// offset for error messages.
class Cursor {
 public:
  explicit Cursor(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    buf_ = ss.str();
  }

  bool eof() const { return pos_ >= buf_.size(); }
  std::size_t offset() const { return pos_; }
  char peek() const { return buf_[pos_]; }
  char get() { return buf_[pos_++]; }
  bool starts_with(std::string_view s) const {
    return buf_.compare(pos_, s.size(), s) == 0;
  }
  void advance(std::size_t n) { pos_ += n; }

  // Skip until `end` (inclusive). Returns false on EOF.
  bool skip_past(std::string_view end) {
    std::size_t found = buf_.find(end, pos_);
    if (found == std::string::npos) return false;
    pos_ = found + end.size();
    return true;
  }

 private:
  std::string buf_;
  std::size_t pos_ = 0;
};

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         c == ':' || c == '.';
}

void skip_ws(Cursor& c) {
  while (!c.eof() && std::isspace(static_cast<unsigned char>(c.peek()))) c.get();
}

}  // namespace

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(text[i++]);  // lone '&', keep literally
      continue;
    }
    std::string_view name = text.substr(i + 1, semi - i - 1);
    if (name == "lt") {
      out.push_back('<');
    } else if (name == "gt") {
      out.push_back('>');
    } else if (name == "amp") {
      out.push_back('&');
    } else if (name == "quot") {
      out.push_back('"');
    } else if (name == "apos") {
      out.push_back('\'');
    } else if (name == "nbsp") {
      out.push_back(' ');
    } else if (!name.empty() && name[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = name.size() > 1;
      if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
        for (std::size_t k = 2; k < name.size() && ok; ++k) {
          char d = name[k];
          std::uint32_t v;
          if (d >= '0' && d <= '9') v = static_cast<std::uint32_t>(d - '0');
          else if (d >= 'a' && d <= 'f') v = static_cast<std::uint32_t>(d - 'a' + 10);
          else if (d >= 'A' && d <= 'F') v = static_cast<std::uint32_t>(d - 'A' + 10);
          else { ok = false; break; }
          cp = cp * 16 + v;
        }
      } else {
        for (std::size_t k = 1; k < name.size() && ok; ++k) {
          char d = name[k];
          if (d < '0' || d > '9') { ok = false; break; }
          cp = cp * 10 + static_cast<std::uint32_t>(d - '0');
        }
      }
      if (ok && cp > 0 && cp <= 0x10FFFF) {
        append_utf8(out, cp);
      } else {
        out.append(text.substr(i, semi - i + 1));
      }
    } else {
      out.append(text.substr(i, semi - i + 1));  // unknown entity, keep
    }
    i = semi + 1;
  }
  return out;
}

void scan_xml_rows(std::istream& in, const std::function<void(const XmlRow&)>& on_row) {
  Cursor c(in);

  // UTF-8 BOM, if any.
  if (c.starts_with("\xEF\xBB\xBF")) c.advance(3);

  while (true) {
    // Inter-tag text. Dumps only carry whitespace here; anything else
    // is ignored rather than rejected.
    while (!c.eof() && c.peek() != '<') c.get();
    if (c.eof()) return;

    std::size_t tag_offset = c.offset();
    c.get();  // '<'
    if (c.eof()) throw ParseError("unexpected end of input inside tag", tag_offset);

    if (c.starts_with("?")) {
      if (!c.skip_past("?>")) throw ParseError("unterminated XML declaration", tag_offset);
      continue;
    }
    if (c.starts_with("!--")) {
      if (!c.skip_past("-->")) throw ParseError("unterminated comment", tag_offset);
      continue;
    }
    if (c.starts_with("!")) {
      if (!c.skip_past(">")) throw ParseError("unterminated declaration", tag_offset);
      continue;
    }
    if (c.starts_with("/")) {
      if (!c.skip_past(">")) throw ParseError("unterminated closing tag", tag_offset);
      continue;
    }

    XmlRow row;
    row.byte_offset = tag_offset;
    while (!c.eof() && is_name_char(c.peek())) row.element.push_back(c.get());
    if (row.element.empty()) throw ParseError("malformed tag name", tag_offset);

    // Attributes until '>' or '/>'.
    while (true) {
      skip_ws(c);
      if (c.eof()) throw ParseError("unexpected end of input inside element", tag_offset);
      if (c.peek() == '>') {
        c.get();
        break;
      }
      if (c.starts_with("/>")) {
        c.advance(2);
        break;
      }
      XmlAttribute attr;
      std::size_t attr_offset = c.offset();
      while (!c.eof() && is_name_char(c.peek())) attr.name.push_back(c.get());
      if (attr.name.empty()) throw ParseError("malformed attribute name", attr_offset);
      skip_ws(c);
      if (c.eof() || c.peek() != '=') throw ParseError("expected '=' after attribute name", attr_offset);
      c.get();
      skip_ws(c);
      if (c.eof() || (c.peek() != '"' && c.peek() != '\'')) {
        throw ParseError("expected quoted attribute value", attr_offset);
      }
      char quote = c.get();
      std::string raw;
      while (!c.eof() && c.peek() != quote) raw.push_back(c.get());
      if (c.eof()) throw ParseError("unterminated attribute value", attr_offset);
      c.get();  // closing quote
      attr.value = decode_entities(raw);
      row.attributes.push_back(std::move(attr));
    }
    on_row(row);
  }
}

}  // namespace dupq
