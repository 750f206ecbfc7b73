#include "xml.hpp"

#include <cctype>

namespace itflow::xml {

const XmlAttr* XmlElement::attr(std::string_view name) const {
  for (const XmlAttr& a : attrs)
    if (a.name == name) return &a;
  return nullptr;
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  bool starts_with(std::string_view s) const { return text.compare(pos, s.size(), s) == 0; }

  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }

  void skip(std::size_t n) {
    for (std::size_t i = 0; i < n && !eof(); ++i) take();
  }

  [[noreturn]] void error(const std::string& message) const {
    fail(Err::XmlSyntax, message + " at line " + std::to_string(line));
  }
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == ':';
}

void skip_ws(Cursor& c) {
  while (!c.eof() && is_space(c.peek())) c.take();
}

void skip_comment(Cursor& c) {
  c.skip(4);  // <!--
  while (!c.eof()) {
    if (c.starts_with("-->")) {
      c.skip(3);
      return;
    }
    c.take();
  }
  c.error("unterminated comment");
}

// Whitespace and comments are the only things allowed between tags.
void skip_gaps(Cursor& c) {
  while (!c.eof()) {
    if (is_space(c.peek())) {
      c.take();
    } else if (c.starts_with("<!--")) {
      skip_comment(c);
    } else {
      return;
    }
  }
}

std::string read_name(Cursor& c) {
  if (c.eof() || !is_name_start(c.peek())) c.error("expected a name");
  std::string name;
  name.push_back(c.take());
  while (!c.eof() && is_name_char(c.peek())) name.push_back(c.take());
  return name;
}

std::string decode_entity(Cursor& c) {
  c.take();  // &
  std::string ref;
  while (!c.eof() && c.peek() != ';') {
    ref.push_back(c.take());
    if (ref.size() > 8) c.error("malformed entity reference");
  }
  if (c.eof()) c.error("unterminated entity reference");
  c.take();  // ;
  if (ref == "amp") return "&";
  if (ref == "lt") return "<";
  if (ref == "gt") return ">";
  if (ref == "quot") return "\"";
  if (ref == "apos") return "'";
  if (ref.size() > 1 && ref[0] == '#') {
    long code = 0;
    std::size_t i = 1;
    int base = 10;
    if (ref[1] == 'x' || ref[1] == 'X') {
      base = 16;
      i = 2;
    }
    if (i >= ref.size()) c.error("malformed character reference");
    for (; i < ref.size(); ++i) {
      const char d = ref[i];
      int v;
      if (d >= '0' && d <= '9')
        v = d - '0';
      else if (base == 16 && d >= 'a' && d <= 'f')
        v = d - 'a' + 10;
      else if (base == 16 && d >= 'A' && d <= 'F')
        v = d - 'A' + 10;
      else
        c.error("malformed character reference");
      code = code * base + v;
      if (code > 0x10FFFF) c.error("character reference out of range");
    }
    // Encode as UTF-8.
    std::string out;
    if (code < 0x80) {
      out.push_back(static_cast<char>(code));
    } else if (code < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (code >> 6)));
      out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    } else if (code < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (code >> 12)));
      out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (code >> 18)));
      out.push_back(static_cast<char>(0x80 | ((code >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((code >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (code & 0x3F)));
    }
    return out;
  }
  c.error("unknown entity '&" + ref + ";'");
}

std::string read_attr_value(Cursor& c) {
  if (c.eof() || (c.peek() != '"' && c.peek() != '\'')) c.error("expected a quoted value");
  const char quote = c.take();
  std::string value;
  while (!c.eof() && c.peek() != quote) {
    if (c.peek() == '<') c.error("'<' is not allowed in attribute values");
    if (c.peek() == '&')
      value += decode_entity(c);
    else
      value.push_back(c.take());
  }
  if (c.eof()) c.error("unterminated attribute value");
  c.take();
  return value;
}

// Reads attributes up to '>' or '/>'. Returns true for a self-closing tag.
bool read_tag_rest(Cursor& c, XmlElement& el) {
  while (true) {
    const bool had_space = !c.eof() && is_space(c.peek());
    skip_ws(c);
    if (c.eof()) c.error("unterminated start tag");
    if (c.peek() == '>') {
      c.take();
      return false;
    }
    if (c.starts_with("/>")) {
      c.skip(2);
      return true;
    }
    if (!had_space) c.error("expected whitespace before attribute");
    XmlAttr attr;
    attr.line = c.line;
    attr.name = read_name(c);
    skip_ws(c);
    if (c.eof() || c.peek() != '=') c.error("expected '=' after attribute name");
    c.take();
    skip_ws(c);
    attr.value = read_attr_value(c);
    for (const XmlAttr& existing : el.attrs)
      if (existing.name == attr.name) c.error("duplicate attribute '" + attr.name + "'");
    el.attrs.push_back(std::move(attr));
  }
}

}  // namespace

XmlElement parse(std::string_view text) {
  Cursor c{text};

  skip_ws(c);
  if (c.starts_with("<?")) {
    while (!c.eof() && !c.starts_with("?>")) c.take();
    if (c.eof()) c.error("unterminated XML prolog");
    c.skip(2);
  }
  skip_gaps(c);
  if (c.eof()) c.error("document has no root element");

  // Open elements, root first. Building by value keeps the parser iterative.
  std::vector<XmlElement> stack;
  XmlElement root;
  bool have_root = false;

  while (true) {
    if (have_root && stack.empty()) break;
    if (c.eof()) c.error("unexpected end of input");
    if (c.peek() != '<') c.error("text content is not supported");
    if (c.starts_with("<!--")) {
      skip_comment(c);
      skip_gaps(c);
      continue;
    }
    if (c.starts_with("<!")) c.error("unsupported markup");
    if (c.starts_with("<?")) c.error("processing instructions must precede the root element");

    if (c.starts_with("</")) {
      if (stack.empty()) c.error("closing tag without an open element");
      c.skip(2);
      const std::string name = read_name(c);
      skip_ws(c);
      if (c.eof() || c.peek() != '>') c.error("malformed closing tag");
      c.take();
      if (name != stack.back().name)
        c.error("mismatched closing tag </" + name + ">, expected </" + stack.back().name + ">");
      XmlElement done = std::move(stack.back());
      stack.pop_back();
      if (stack.empty()) {
        root = std::move(done);
        have_root = true;
      } else {
        stack.back().children.push_back(std::move(done));
      }
      skip_gaps(c);
      continue;
    }

    c.take();  // <
    XmlElement el;
    el.line = c.line;
    el.name = read_name(c);
    const bool self_closing = read_tag_rest(c, el);
    if (self_closing) {
      if (stack.empty()) {
        root = std::move(el);
        have_root = true;
      } else {
        stack.back().children.push_back(std::move(el));
      }
    } else {
      stack.push_back(std::move(el));
    }
    skip_gaps(c);
  }

  skip_gaps(c);
  if (!c.eof()) c.error("content after the root element");
  return root;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

}  // namespace itflow::xml
