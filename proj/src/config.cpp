#include "qwalk/config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

#include "qwalk/errors.hpp"

namespace qw {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

namespace {

struct Table {
  ParamMap entries;
};
using Value = std::variant<double, std::string, std::vector<double>, Table>;

struct Entry {
  Value value;
  int line;
};

class Parser {
 public:
  Parser(std::string_view line, int lineno) : s_(line), line_(lineno) {}

  Value value() {
    skip_ws();
    if (eof()) fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return string();
    if (c == '[') return array();
    if (c == '{') return table();
    return number();
  }

  std::string key() {
    skip_ws();
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (eof() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void finish() {
    skip_ws();
    if (!eof() && s_[pos_] != '#') fail("unexpected trailing text");
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!eof() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  double number() {
    skip_ws();
    std::size_t start = pos_;
    if (!eof() && s_[pos_] == '+') ++start, ++pos_;
    double v = 0.0;
    auto res = std::from_chars(s_.data() + start, s_.data() + s_.size(), v);
    if (res.ec != std::errc{} || res.ptr == s_.data() + start) fail("expected a number");
    pos_ = static_cast<std::size_t>(res.ptr - s_.data());
    if (!std::isfinite(v)) fail("number must be finite");
    return v;
  }

  std::string string() {
    ++pos_;
    const std::size_t start = pos_;
    while (!eof() && s_[pos_] != '"') ++pos_;
    if (eof()) fail("unterminated string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  std::vector<double> array() {
    ++pos_;
    std::vector<double> out;
    skip_ws();
    if (!eof() && s_[pos_] == ']') {
      ++pos_;
      return out;
    }
    for (;;) {
      out.push_back(number());
      skip_ws();
      if (eof()) fail("unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return out;
      }
      if (s_[pos_] != ',') fail("expected ',' or ']' in array");
      ++pos_;
    }
  }

  Table table() {
    ++pos_;
    Table t;
    skip_ws();
    if (!eof() && s_[pos_] == '}') {
      ++pos_;
      return t;
    }
    for (;;) {
      std::string k = key();
      expect('=');
      const double v = number();
      if (!t.entries.emplace(k, v).second) fail("duplicate key '" + k + "' in table");
      skip_ws();
      if (eof()) fail("unterminated table");
      if (s_[pos_] == '}') {
        ++pos_;
        return t;
      }
      if (s_[pos_] != ',') fail("expected ',' or '}' in table");
      ++pos_;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

using Section = std::map<std::string, Entry, std::less<>>;

cplx complex_of(const Section& sec, const std::string& section, const std::string& name) {
  const auto cart = sec.find(name);
  const auto polar = sec.find(name + "_polar");
  if (cart != sec.end() && polar != sec.end()) {
    throw ValidationError(section + "." + name, "give either " + name + " or " + name + "_polar");
  }
  const auto& it = cart != sec.end() ? cart : polar;
  if (it == sec.end()) throw ValidationError(section + "." + name, "missing");
  const auto* pair = std::get_if<std::vector<double>>(&it->second.value);
  if (pair == nullptr || pair->size() != 2) {
    throw ParseError(it->second.line, section + "." + it->first + " must be a [x, y] pair");
  }
  if (it == cart) return {(*pair)[0], (*pair)[1]};
  return std::polar((*pair)[0], (*pair)[1]);
}

Coin coin_of(const Section& sec, const std::string& section) {
  for (const auto& [k, e] : sec) {
    if (k != "alpha" && k != "alpha_polar" && k != "beta" && k != "beta_polar" && k != "delta") {
      throw ParseError(e.line, "unknown key '" + k + "' in [" + section + "]");
    }
  }
  const cplx alpha = complex_of(sec, section, "alpha");
  const cplx beta = complex_of(sec, section, "beta");
  const auto d = sec.find("delta");
  if (d == sec.end()) throw ValidationError(section + ".delta", "missing");
  const auto* dv = std::get_if<double>(&d->second.value);
  if (dv == nullptr) throw ParseError(d->second.line, section + ".delta must be a number");
  try {
    return Coin::make(alpha, beta, *dv);
  } catch (const ValidationError& e) {
    throw ValidationError(section + "." + e.field(),
                          std::string(e.what()).substr(e.field().size() + 2));
  }
}

}  // namespace

ModelConfig load_model_config(std::string_view text) {
  Section top;
  std::map<std::string, Section, std::less<>> sections;
  std::string current;
  int lineno = 0;

  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;

    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    Parser p(line.substr(first), lineno);
    if (line[first] == '[') {
      const std::size_t close = line.find(']', first);
      if (close == std::string_view::npos) p.fail("unterminated section header");
      std::string name(line.substr(first + 1, close - first - 1));
      if (name != "minus" && name != "origin" && name != "plus") {
        p.fail("unknown section [" + name + "]");
      }
      if (sections.count(name) != 0) p.fail("duplicate section [" + name + "]");
      Parser rest(line.substr(close + 1), lineno);
      rest.finish();
      sections[name];
      current = name;
    } else {
      std::string k = p.key();
      p.expect('=');
      Value v = p.value();
      p.finish();
      Section& target = current.empty() ? top : sections[current];
      if (target.count(k) != 0) p.fail("duplicate key '" + k + "'");
      target.emplace(k, Entry{std::move(v), lineno});
    }
    if (end == text.size()) break;
  }

  ModelConfig cfg;
  const auto pre = top.find("preset");
  for (const auto& [k, e] : top) {
    if (k != "preset" && k != "params") throw ParseError(e.line, "unknown top-level key '" + k + "'");
  }
  if (pre != top.end()) {
    if (!sections.empty()) {
      throw ParseError(pre->second.line, "a preset document cannot also define coin sections");
    }
    const auto* name = std::get_if<std::string>(&pre->second.value);
    if (name == nullptr) throw ParseError(pre->second.line, "preset must be a string");
    const auto par = top.find("params");
    if (par != top.end()) {
      const auto* t = std::get_if<Table>(&par->second.value);
      if (t == nullptr) throw ParseError(par->second.line, "params must be a { key = value } table");
      cfg.params = t->entries;
    }
    cfg.preset = *name;
    cfg.spec = preset(*name, cfg.params);
    return cfg;
  }
  if (top.count("params") != 0) {
    throw ParseError(top.at("params").line, "params given without a preset");
  }
  for (const char* name : {"minus", "origin", "plus"}) {
    if (sections.count(name) == 0) throw ValidationError(name, "missing section");
  }
  cfg.spec = ModelSpec{coin_of(sections["minus"], "minus"), coin_of(sections["origin"], "origin"),
                       coin_of(sections["plus"], "plus")};
  return cfg;
}

ModelSpec load_model(std::string_view text) { return load_model_config(text).spec; }

ModelConfig load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model_config(ss.str());
}

std::string serialize(const ModelSpec& m) {
  std::string out;
  auto pair = [](cplx z) { return "[" + format_double(z.real()) + ", " + format_double(z.imag()) + "]"; };
  for (auto [name, coin] : {std::pair<const char*, const Coin*>{"minus", &m.minus},
                            {"origin", &m.origin},
                            {"plus", &m.plus}}) {
    out += "[";
    out += name;
    out += "]\n";
    out += "alpha = " + pair(coin->alpha()) + "\n";
    out += "beta = " + pair(coin->beta()) + "\n";
    out += "delta = " + format_double(coin->delta()) + "\n";
    if (coin != &m.plus) out += "\n";
  }
  return out;
}

}  // namespace qw
