#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <string>
#include <vector>

namespace dupq {

// Minimal streaming scanner for the Stack Exchange dump layout: one
// root element wrapping flat, self-closing `<row .../>` elements whose
// payload lives entirely in attributes. Not a general XML parser; it
// understands exactly what the dumps emit (prolog, comments, entity
// escapes in attribute values) and reports anything else as a
// ParseError with the byte offset of the offending construct.

struct XmlAttribute {
  std::string name;
  std::string value;  // entity-decoded
};

struct XmlRow {
  std::string element;  // element name, usually "row"
  std::vector<XmlAttribute> attributes;
  std::size_t byte_offset = 0;  // offset of the opening '<'

  const std::string* attr(const std::string& name) const {
    for (const auto& a : attributes) {
      if (a.name == name) return &a.value;
    }
    return nullptr;
  }
};

// Calls `on_row` for every element in the stream (root element
// included, with its own attributes, before its children). Throws
// ParseError on malformed input.
void scan_xml_rows(std::istream& in, const std::function<void(const XmlRow&)>& on_row);

// Decode the XML/HTML entities that appear in dump attributes and
// question bodies: the five predefined names, numeric references
// (decimal and hex, emitted as UTF-8) and &nbsp; (as a plain space).
// Unknown entities are kept literally.
std::string decode_entities(std::string_view text);

}  // namespace dupq
