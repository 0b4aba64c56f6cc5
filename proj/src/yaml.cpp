#include "vega/yaml.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <vector>

namespace vega {
namespace {

struct Line {
  int indent = 0;
  std::string content;
  int lineno = 0;
};

bool is_plain_int(std::string_view s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

bool is_plain_float(std::string_view s) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool digits = false, dot = false, exp = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = true;
    } else if (c == '.' && !dot && !exp) {
      dot = true;
    } else if ((c == 'e' || c == 'E') && digits && !exp) {
      exp = true;
      digits = false;
      if (i + 1 < s.size() && (s[i + 1] == '-' || s[i + 1] == '+')) ++i;
    } else {
      return false;
    }
  }
  return digits && (dot || exp);
}

class FlowParser {
 public:
  FlowParser(std::string_view s, int lineno, int col_base)
      : s_(s), lineno_(lineno), col_base_(col_base) {}

  json parse() {
    json v = parse_value();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, lineno_, col_base_ + int(pos_) + 1);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  json parse_value() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected a value");
    const char c = s_[pos_];
    if (c == '[') return parse_seq(']');
    if (c == '(') return parse_seq(')');
    if (c == '{') return parse_map();
    if (c == '"' || c == '\'') return parse_quoted();
    return parse_plain();
  }

  json parse_seq(char close) {
    ++pos_;  // opening bracket
    json arr = json::array();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == close) {
      ++pos_;
      return arr;
    }
    while (true) {
      arr.push_back(parse_value());
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated sequence");
      if (s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (s_[pos_] == close) {
        ++pos_;
        return arr;
      }
      fail("expected ',' or closing bracket");
    }
  }

  json parse_map() {
    ++pos_;  // '{'
    json obj = json::object();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '}') {
      ++pos_;
      return obj;
    }
    while (true) {
      skip_ws();
      std::string key;
      if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) {
        key = parse_quoted().get<std::string>();
      } else {
        const size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ':' && s_[pos_] != '}' &&
               s_[pos_] != ',')
          ++pos_;
        key = std::string(s_.substr(start, pos_ - start));
        while (!key.empty() && key.back() == ' ') key.pop_back();
      }
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != ':') fail("expected ':' in mapping");
      ++pos_;
      obj[key] = parse_value();
      skip_ws();
      if (pos_ >= s_.size()) fail("unterminated mapping");
      if (s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (s_[pos_] == '}') {
        ++pos_;
        return obj;
      }
      fail("expected ',' or '}'");
    }
  }

  json parse_quoted() {
    const char quote = s_[pos_++];
    std::string out;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (c == quote) {
        if (quote == '\'' && pos_ < s_.size() && s_[pos_] == '\'') {
          out.push_back('\'');
          ++pos_;
          continue;
        }
        return json(out);
      }
      if (quote == '"' && c == '\\' && pos_ < s_.size()) {
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(std::string("unknown escape '\\") + e + "'");
        }
        continue;
      }
      out.push_back(c);
    }
    fail("unterminated quoted string");
  }

  json parse_plain() {
    const size_t start = pos_;
    int depth = 0;
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (depth == 0 && (c == ',' || c == ']' || c == ')' || c == '}')) break;
      if (c == '[' || c == '(') ++depth;
      if (c == ']' || c == ')') --depth;
      ++pos_;
    }
    std::string_view tok = s_.substr(start, pos_ - start);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t'))
      tok.remove_suffix(1);
    if (tok.empty()) fail("expected a value");
    return typed_scalar(tok);
  }

  json typed_scalar(std::string_view tok) const {
    if (tok == "true" || tok == "True") return json(true);
    if (tok == "false" || tok == "False") return json(false);
    if (tok == "null" || tok == "~") return json(nullptr);
    if (is_plain_int(tok)) {
      std::int64_t v = 0;
      const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (res.ec == std::errc()) return json(v);
      return json(std::strtod(std::string(tok).c_str(), nullptr));
    }
    if (is_plain_float(tok))
      return json(std::strtod(std::string(tok).c_str(), nullptr));
    return json(std::string(tok));
  }

  std::string_view s_;
  size_t pos_ = 0;
  int lineno_;
  int col_base_;
};

/// Finds the first ':' at bracket/quote depth zero that is followed by a
/// space or end of line. Returns npos if the text is not a mapping entry.
size_t find_mapping_colon(std::string_view s) {
  int depth = 0;
  char quote = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '[' || c == '(' || c == '{') {
      ++depth;
    } else if (c == ']' || c == ')' || c == '}') {
      --depth;
    } else if (c == ':' && depth == 0) {
      if (i + 1 == s.size() || s[i + 1] == ' ') return i;
    }
  }
  return std::string_view::npos;
}

class BlockParser {
 public:
  explicit BlockParser(std::string_view text) {
    int lineno = 0;
    size_t start = 0;
    while (start <= text.size()) {
      size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      ++lineno;
      start = end + 1;

      int indent = 0;
      while (indent < int(raw.size()) && raw[indent] == ' ') ++indent;
      if (indent < int(raw.size()) && raw[indent] == '\t')
        throw ParseError("tabs are not allowed in indentation", lineno,
                         indent + 1);
      std::string_view body = raw.substr(indent);
      body = strip_comment(body);
      while (!body.empty() && (body.back() == ' ' || body.back() == '\r'))
        body.remove_suffix(1);
      if (body.empty()) {
        if (end == text.size()) break;
        continue;
      }
      lines_.push_back({indent, std::string(body), lineno});
      if (end == text.size()) break;
    }
  }

  json parse_document() {
    if (lines_.empty()) return json::object();
    json root = parse_block(lines_[0].indent);
    if (pos_ < lines_.size())
      throw ParseError("unexpected de-indent", lines_[pos_].lineno,
                       lines_[pos_].indent + 1);
    return root;
  }

 private:
  static std::string_view strip_comment(std::string_view s) {
    char quote = 0;
    for (size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (quote) {
        if (c == quote) quote = 0;
        continue;
      }
      if (c == '"' || c == '\'') quote = c;
      if (c == '#' && (i == 0 || s[i - 1] == ' ')) return s.substr(0, i);
    }
    return s;
  }

  const Line* peek() const { return pos_ < lines_.size() ? &lines_[pos_] : nullptr; }

  static bool is_seq_item(const Line& ln) {
    return ln.content[0] == '-' &&
           (ln.content.size() == 1 || ln.content[1] == ' ');
  }

  json parse_block(int indent) {
    const Line* ln = peek();
    if (!ln || ln->indent != indent)
      throw ParseError("expected a block", ln ? ln->lineno : 0, indent + 1);
    return is_seq_item(*ln) ? parse_sequence(indent) : parse_mapping(indent);
  }

  json parse_mapping(int indent) {
    json obj = json::object();
    while (const Line* ln = peek()) {
      if (ln->indent != indent || is_seq_item(*ln)) {
        if (ln->indent > indent)
          throw ParseError("unexpected indent", ln->lineno, ln->indent + 1);
        break;
      }
      const size_t colon = find_mapping_colon(ln->content);
      if (colon == std::string_view::npos)
        throw ParseError("expected 'key: value'", ln->lineno, indent + 1);
      std::string key = ln->content.substr(0, colon);
      while (!key.empty() && key.back() == ' ') key.pop_back();
      if (!key.empty() && (key.front() == '"' || key.front() == '\''))
        key = FlowParser(key, ln->lineno, indent).parse().get<std::string>();
      if (obj.contains(key))
        throw ParseError("duplicate key '" + key + "'", ln->lineno, indent + 1);
      std::string rest = ln->content.substr(colon + 1);
      size_t skip = 0;
      while (skip < rest.size() && rest[skip] == ' ') ++skip;
      rest = rest.substr(skip);
      const int lineno = ln->lineno;
      ++pos_;
      if (!rest.empty()) {
        obj[key] = FlowParser(rest, lineno, indent + int(colon) + 2 + int(skip))
                       .parse();
      } else if (const Line* next = peek();
                 next && next->indent > indent) {
        obj[key] = parse_block(next->indent);
      } else {
        obj[key] = json(nullptr);
      }
    }
    return obj;
  }

  json parse_sequence(int indent) {
    json arr = json::array();
    while (const Line* ln = peek()) {
      if (ln->indent != indent || !is_seq_item(*ln)) {
        if (ln->indent > indent)
          throw ParseError("unexpected indent", ln->lineno, ln->indent + 1);
        break;
      }
      std::string rest = ln->content.substr(1);
      size_t skip = 0;
      while (skip < rest.size() && rest[skip] == ' ') ++skip;
      rest = rest.substr(skip);
      const int item_indent = indent + 1 + int(skip);
      const int lineno = ln->lineno;
      if (rest.empty()) {
        ++pos_;
        if (const Line* next = peek(); next && next->indent > indent) {
          arr.push_back(parse_block(next->indent));
        } else {
          arr.push_back(json(nullptr));
        }
      } else if (find_mapping_colon(rest) != std::string_view::npos) {
        // compact "- key: value" item: rewrite the line as the first
        // entry of a nested mapping and parse it in place
        lines_[pos_] = {item_indent, rest, lineno};
        arr.push_back(parse_mapping(item_indent));
      } else {
        ++pos_;
        arr.push_back(FlowParser(rest, lineno, item_indent).parse());
      }
    }
    return arr;
  }

  std::vector<Line> lines_;
  size_t pos_ = 0;
};

bool plain_safe(const std::string& s) {
  if (s.empty()) return false;
  if (s == "true" || s == "false" || s == "null" || s == "~" || s == "True" ||
      s == "False")
    return false;
  if (is_plain_int(s) || is_plain_float(s)) return false;
  if (s.front() == ' ' || s.back() == ' ' || s.front() == '-') return false;
  for (const char c : s)
    if (std::string_view("#:[](){},\"'\n\t").find(c) != std::string_view::npos)
      return false;
  return true;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\t') {
      out += "\\t";
      continue;
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string emit_scalar(const json& v) {
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    return plain_safe(s) ? s : quote(s);
  }
  return v.dump();
}

bool all_scalars(const json& arr) {
  for (const auto& v : arr)
    if (v.is_structured()) return false;
  return true;
}

std::string emit_flow(const json& arr) {
  std::string out = "[";
  bool first = true;
  for (const auto& v : arr) {
    if (!first) out += ", ";
    first = false;
    out += emit_scalar(v);
  }
  return out + "]";
}

void emit_node(const json& node, int indent, std::string& out);

void emit_entry(const std::string& prefix, const json& v, int indent,
                std::string& out) {
  if (v.is_object() && !v.empty()) {
    out += prefix + "\n";
    emit_node(v, indent + 2, out);
  } else if (v.is_array() && !v.empty() && !all_scalars(v)) {
    out += prefix + "\n";
    emit_node(v, indent + 2, out);
  } else if (v.is_array()) {
    out += prefix + " " + emit_flow(v) + "\n";
  } else if (v.is_object()) {
    out += prefix + " {}\n";
  } else {
    out += prefix + " " + emit_scalar(v) + "\n";
  }
}

void emit_node(const json& node, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  if (node.is_object()) {
    for (const auto& [key, v] : node.items()) {
      const std::string k = plain_safe(key) ? key : quote(key);
      emit_entry(pad + k + ":", v, indent, out);
    }
  } else if (node.is_array()) {
    for (const auto& v : node) {
      if (v.is_object() && !v.empty()) {
        // compact "- key: value" form
        std::string sub;
        emit_node(v, indent + 2, sub);
        sub.replace(0, indent + 2, pad + "- ");
        out += sub;
      } else {
        emit_entry(pad + "-", v, indent, out);
      }
    }
  } else {
    out += pad + emit_scalar(node) + "\n";
  }
}

}  // namespace

json parse_yaml(std::string_view text) {
  return BlockParser(text).parse_document();
}

std::string emit_yaml(const json& root) {
  std::string out;
  emit_node(root, 0, out);
  return out;
}

}  // namespace vega
