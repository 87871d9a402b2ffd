#include "poisson4d/structure_io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace p4d {

using nlohmann::json;

namespace {

constexpr const char* kSigmaKeys[6] = {"s12", "s13", "s14", "s23", "s24", "s34"};

Expr parse_key(const std::string& key, const std::string& text) {
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw FormatError(key, e.what());
  }
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(key, "missing key");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw FormatError(where, "expected a number");
  return j.get<double>();
}

std::string string(const json& j, const std::string& where) {
  if (!j.is_string()) throw FormatError(where, "expected a string");
  return j.get<std::string>();
}

template <class T, class F>
std::array<T, 4> four(const json& j, const std::string& where, F&& item) {
  if (!j.is_array() || j.size() != 4) throw FormatError(where, "expected an array of 4 entries");
  std::array<T, 4> out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = item(j[i], where + "[" + std::to_string(i) + "]");
  return out;
}

}  // namespace

FamilyStructure StructureDefinition::build() const {
  std::array<Expr, 4> ps, ph;
  for (std::size_t i = 0; i < 4; ++i) {
    ps[i] = parse_key("psi[" + std::to_string(i) + "]", psi[i]);
    ph[i] = parse_key("phi[" + std::to_string(i) + "]", phi[i]);
  }
  Expr e = parse_key("eta", eta);
  std::optional<Expr> h;
  if (!hamiltonian.empty()) h = parse_key("hamiltonian", hamiltonian);
  BoxDomain box;
  try {
    box = BoxDomain::make(lower, upper);
  } catch (const Error& err) {
    throw FormatError("domain", err.what());
  }
  try {
    return FamilyStructure::make(sigma, e, ps, ph, box, std::move(h));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& err) {
    throw FormatError("", err.what());
  }
}

StructureDefinition definition_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("", "definition must be an object");
  StructureDefinition d;
  if (j.contains("name")) d.name = string(j["name"], "name");
  if (j.contains("description")) d.description = string(j["description"], "description");
  const json& s = require(j, "sigma");
  if (!s.is_object()) throw FormatError("sigma", "expected an object");
  for (int p = 0; p < 6; ++p) {
    std::string key = std::string("sigma.") + kSigmaKeys[p];
    auto it = s.find(kSigmaKeys[p]);
    if (it == s.end()) throw FormatError(key, "missing key");
    d.sigma.values[static_cast<std::size_t>(p)] = number(*it, key);
  }
  d.eta = j.contains("eta") ? string(j["eta"], "eta") : "1";
  auto str_item = [](const json& v, const std::string& w) { return string(v, w); };
  auto num_item = [](const json& v, const std::string& w) { return number(v, w); };
  if (j.contains("psi")) d.psi = four<std::string>(j["psi"], "psi", str_item);
  d.phi = four<std::string>(require(j, "phi"), "phi", str_item);
  const json& dom = require(j, "domain");
  if (!dom.is_object()) throw FormatError("domain", "expected an object");
  d.lower = four<double>(require(dom, "lower"), "domain.lower", num_item);
  d.upper = four<double>(require(dom, "upper"), "domain.upper", num_item);
  if (j.contains("hamiltonian")) d.hamiltonian = string(j["hamiltonian"], "hamiltonian");
  if (j.contains("limit")) {
    std::string lim = string(j["limit"], "limit");
    if (lim != "leaf") throw FormatError("limit", "only \"leaf\" is supported");
    d.leaf_limit = true;
  }
  if (j.contains("leaf")) d.leaf = number(j["leaf"], "leaf");
  return d;
}

nlohmann::ordered_json definition_to_json(const StructureDefinition& d) {
  nlohmann::ordered_json j;
  if (!d.name.empty()) j["name"] = d.name;
  if (!d.description.empty()) j["description"] = d.description;
  nlohmann::ordered_json s;
  for (int p = 0; p < 6; ++p) s[kSigmaKeys[p]] = d.sigma.values[static_cast<std::size_t>(p)];
  j["sigma"] = s;
  j["eta"] = d.eta;
  j["psi"] = d.psi;
  j["phi"] = d.phi;
  j["domain"] = {{"lower", d.lower}, {"upper", d.upper}};
  if (!d.hamiltonian.empty()) j["hamiltonian"] = d.hamiltonian;
  if (d.leaf_limit) j["limit"] = "leaf";
  if (d.leaf) j["leaf"] = *d.leaf;
  return j;
}

namespace {

class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : s_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_space_and_comments(true);
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        std::string name = bare_key();
        expect(']');
        if (root.contains(name)) fail("duplicate table [" + name + "]");
        root[name] = json::object();
        table = &root[name];
      } else {
        std::string key = bare_key();
        skip_inline_space();
        expect('=');
        skip_inline_space();
        if (table->contains(key)) fail("duplicate key " + key);
        (*table)[key] = value();
      }
      skip_inline_space();
      if (!eof() && peek() == '#') skip_comment();
      if (!eof() && peek() != '\n' && peek() != '\r') fail("expected end of line");
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError("toml line " + std::to_string(line_), what);
  }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_comment() {
    while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_inline_space() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_space_and_comments(bool newlines) {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n' && newlines) {
        ++line_;
        ++pos_;
      } else if (c == '#') {
        skip_comment();
      } else {
        break;
      }
    }
  }

  std::string bare_key() {
    skip_inline_space();
    std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (pos_ == start) fail("expected a key");
    std::string key(s_.substr(start, pos_ - start));
    skip_inline_space();
    return key;
  }

  json value() {
    if (eof()) fail("expected a value");
    char c = peek();
    if (c == '"') return basic_string();
    if (c == '[') return array();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  json basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      char e = s_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
    return out;
  }

  json number() {
    std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_')) {
      ++pos_;
    }
    std::string text;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') text += c;
    }
    if (text.empty()) fail("expected a value");
    if (text[0] == '+') text.erase(0, 1);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) fail("invalid number '" + text + "'");
    bool integral = text.find_first_of(".eE") == std::string::npos;
    if (integral) return static_cast<long long>(v);
    return v;
  }

  json array() {
    ++pos_;
    json out = json::array();
    while (true) {
      skip_space_and_comments(true);
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return out;
      }
      out.push_back(value());
      skip_space_and_comments(true);
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_space_and_comments(true);
      expect(']');
      return out;
    }
  }
};

}  // namespace

json parse_toml_subset(std::string_view text) { return TomlReader(text).run(); }

StructureDefinition load_definition(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  bool toml = path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0;
  json j;
  if (toml) {
    j = parse_toml_subset(text);
  } else {
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw FormatError(path, e.what());
    }
  }
  StructureDefinition d = definition_from_json(j);
  d.build();
  return d;
}

}  // namespace p4d
