// Minimal strict XML reader for world files. Supports elements, attributes,
// comments, an optional prolog and the five predefined entities; no text
// content, CDATA or DOCTYPE. Errors carry the 1-based line number.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace itflow::xml {

struct XmlAttr {
  std::string name;
  std::string value;
  int line = 0;
};

struct XmlElement {
  std::string name;
  int line = 0;
  std::vector<XmlAttr> attrs;
  std::vector<XmlElement> children;

  const XmlAttr* attr(std::string_view name) const;
};

// Parses a complete document and returns the root element.
XmlElement parse(std::string_view text);

std::string escape(std::string_view text);

}  // namespace itflow::xml
