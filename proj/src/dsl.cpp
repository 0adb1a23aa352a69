#include "psh/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace psh {

namespace {

// ----------------------------------------------------------------------------
// Lexer

enum class Tok { word, string, punct, arrow, newline, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourceSpan span;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::word: return "'" + t.text + "'";
    case Tok::string: return "string \"" + t.text + "\"";
    case Tok::punct: return "'" + t.text + "'";
    case Tok::arrow: return "'->'";
    case Tok::newline: return "end of line";
    case Tok::end: return "end of input";
  }
  return "?";
}

bool word_start(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view text, const std::string& file) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto span_at = [&](int len) { return SourceSpan{line, col, len}; };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      out.push_back({Tok::newline, "\n", span_at(1)});
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i, ++col;
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({Tok::arrow, "->", span_at(2)});
      i += 2;
      col += 2;
      continue;
    }
    if (word_start(c)) {
      std::size_t j = i;
      while (j < text.size()) {
        const char d = text[j];
        if (word_start(d)) {
          ++j;
        } else if (d == '-' && !(j + 1 < text.size() && text[j + 1] == '>')) {
          ++j;
        } else {
          break;
        }
      }
      const int len = static_cast<int>(j - i);
      out.push_back({Tok::word, std::string(text.substr(i, j - i)), span_at(len)});
      col += len;
      i = j;
      continue;
    }
    if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size() && text[j] != '\n') {
        if (text[j] == '\\' && j + 1 < text.size()) {
          value += text[j + 1];
          j += 2;
          continue;
        }
        if (text[j] == '"') {
          closed = true;
          ++j;
          break;
        }
        value += text[j++];
      }
      const int len = static_cast<int>(j - i);
      if (!closed) throw ParseError(file, span_at(len), "unterminated string");
      out.push_back({Tok::string, value, span_at(len)});
      col += len;
      i = j;
      continue;
    }
    if (std::string_view(":|,(){}+=").find(c) != std::string_view::npos) {
      out.push_back({Tok::punct, std::string(1, c), span_at(1)});
      ++i;
      ++col;
      continue;
    }
    throw ParseError(file, span_at(1), std::string("unexpected character '") + c + "'");
  }
  out.push_back({Tok::newline, "\n", span_at(0)});
  out.push_back({Tok::end, "", span_at(0)});
  return out;
}

// ----------------------------------------------------------------------------
// Parser

enum class NameKind { model, presheaf, identification, derived };

struct Defined {
  NameKind kind;
  SourceSpan span;
};

class Parser {
 public:
  Parser(std::string_view text, std::string file, const IncludeLoader* loader,
         std::vector<std::string>* include_stack, Workspace* ws,
         std::map<std::string, Defined>* names)
      : tokens_(lex(text, file)),
        file_(std::move(file)),
        loader_(loader),
        include_stack_(include_stack),
        ws_(ws),
        names_(names) {}

  void parse_all(bool models_only) {
    skip_newlines();
    if (at_word("format")) {
      next();
      const Token v = expect_word("format version");
      if (v.text != "1") fail(v, "unsupported format version '" + v.text + "' (expected 1)");
      end_statement();
    }
    while (true) {
      skip_newlines();
      if (peek().kind == Tok::end) break;
      const Token& head = peek();
      if (head.kind != Tok::word) fail(head, "expected a statement, found " + describe(head));
      if (head.text == "model") {
        parse_model_block();
      } else if (models_only) {
        fail(head, "expected 'model', found " + describe(head));
      } else if (head.text == "presheaf") {
        parse_presheaf_block();
      } else if (head.text == "include") {
        parse_include();
      } else if (head.text == "identify") {
        parse_identify();
      } else if (head.text == "merge") {
        parse_merge();
      } else if (head.text == "transfer" || head.text == "check") {
        parse_transfer_or_check();
      } else if (head.text == "feature" || head.text == "cover" || head.text == "allow" ||
                 head.text == "forbid" || head.text == "sections") {
        fail(head, "'" + head.text + "' outside of a model block");
      } else {
        fail(head, "unknown statement " + describe(head));
      }
    }
  }

 private:
  // -- token helpers -------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  Token next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(file_, t.span, msg);
  }
  [[noreturn]] void fail(SourceSpan s, const std::string& msg) const {
    throw ParseError(file_, s, msg);
  }

  bool at_punct(char c) const { return peek().kind == Tok::punct && peek().text[0] == c; }
  bool at_word(std::string_view w) const { return peek().kind == Tok::word && peek().text == w; }

  Token expect_punct(char c) {
    if (!at_punct(c))
      fail(peek(), std::string("expected '") + c + "', found " + describe(peek()));
    return next();
  }
  Token expect_arrow() {
    if (peek().kind != Tok::arrow) fail(peek(), "expected '->', found " + describe(peek()));
    return next();
  }
  Token expect_word(const std::string& what) {
    if (peek().kind != Tok::word) fail(peek(), "expected " + what + ", found " + describe(peek()));
    return next();
  }
  Token expect_keyword(std::string_view kw) {
    if (!at_word(kw))
      fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    return next();
  }
  Token expect_name(const std::string& what) {
    Token t = expect_word(what);
    if (!is_valid_feature_name(t.text))
      fail(t, "invalid " + what + " '" + t.text + "' (names match [A-Za-z_][A-Za-z0-9_-]*)");
    return t;
  }
  void end_statement() {
    if (peek().kind != Tok::newline && peek().kind != Tok::end)
      fail(peek(), "expected end of line, found " + describe(peek()));
    skip_newlines();
  }
  void skip_newlines() {
    while (peek().kind == Tok::newline) next();
  }

  // -- names ---------------------------------------------------------------

  void define(const Token& t, NameKind kind) {
    if (auto it = names_->find(t.text); it != names_->end())
      fail(t, "duplicate name '" + t.text + "' (first defined at line " +
                  std::to_string(it->second.span.line) + ")");
    names_->emplace(t.text, Defined{kind, t.span});
  }

  void require(const Token& t, std::initializer_list<NameKind> kinds, const std::string& what) {
    auto it = names_->find(t.text);
    if (it == names_->end()) fail(t, "undefined " + what + " '" + t.text + "'");
    if (std::find(kinds.begin(), kinds.end(), it->second.kind) == kinds.end())
      fail(t, "'" + t.text + "' is not a " + what);
  }

  // -- model / presheaf blocks ----------------------------------------------

  struct BlockFeature {
    Fiber fiber;
    SourceSpan span;
  };

  void parse_feature_line(std::vector<BlockFeature>& features) {
    next();  // feature
    const Token name = expect_name("feature name");
    for (const auto& f : features)
      if (f.fiber.feature == name.text) fail(name, "feature '" + name.text + "' declared twice");
    expect_punct(':');
    Fiber fiber{name.text, {}, {}};
    bool any_label = false;
    while (true) {
      const Token v = expect_word("value");
      if (fiber.contains(v.text))
        fail(v, "duplicate value '" + v.text + "' in the fiber of '" + name.text + "'");
      fiber.values.push_back(v.text);
      std::string label;
      if (at_word("label")) {
        next();
        if (peek().kind != Tok::string) fail(peek(), "expected a label string, found " + describe(peek()));
        label = next().text;
        any_label = true;
      }
      fiber.labels.push_back(label);
      if (!at_punct('|')) break;
      next();
    }
    if (!any_label) fiber.labels.clear();
    end_statement();
    features.push_back({std::move(fiber), name.span});
  }

  const Fiber* lookup(const std::vector<BlockFeature>& features, const std::string& name) {
    for (const auto& f : features)
      if (f.fiber.feature == name) return &f.fiber;
    return nullptr;
  }

  // `(a, b, ...): (v, w, ...), ...` reordered into a canonical-scope table.
  ConstraintTable parse_table_body(const std::vector<BlockFeature>& features, Polarity polarity) {
    expect_punct('(');
    std::vector<Token> scope;
    while (true) {
      const Token f = expect_name("feature name");
      if (!lookup(features, f.text)) fail(f, "unknown feature '" + f.text + "'");
      for (const auto& s : scope)
        if (s.text == f.text) fail(f, "feature '" + f.text + "' repeated in scope");
      scope.push_back(f);
      if (at_punct(')')) break;
      expect_punct(',');
    }
    next();
    expect_punct(':');

    std::vector<std::string> names;
    for (const auto& s : scope) names.push_back(s.text);
    ConstraintTable table{Subset(names), polarity, {}};
    // canonical position of each written column
    std::vector<std::size_t> column(scope.size());
    for (std::size_t i = 0; i < scope.size(); ++i)
      column[i] = static_cast<std::size_t>(
          std::find(table.scope.begin(), table.scope.end(), scope[i].text) - table.scope.begin());

    if (peek().kind == Tok::newline || peek().kind == Tok::end) {
      end_statement();
      return table;  // empty tuple list
    }
    while (true) {
      const Token open = expect_punct('(');
      std::vector<Token> values;
      if (!at_punct(')')) {
        while (true) {
          values.push_back(expect_word("value"));
          if (at_punct(')')) break;
          expect_punct(',');
        }
      }
      next();
      if (values.size() != scope.size())
        fail(SourceSpan{open.span.line, open.span.column, 1},
             "arity mismatch: expected " + std::to_string(scope.size()) + " values, found " +
                 std::to_string(values.size()));
      std::vector<std::string> tuple(scope.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        const Fiber* f = lookup(features, scope[i].text);
        if (!f->contains(values[i].text)) {
          std::string expected;
          for (const auto& v : f->values) expected += (expected.empty() ? "" : ", ") + v;
          fail(values[i], "value '" + values[i].text + "' is not in the fiber of '" +
                              scope[i].text + "' (expected one of " + expected + ")");
        }
        tuple[column[i]] = values[i].text;
      }
      table.tuples.insert(std::move(tuple));
      if (!at_punct(',')) break;
      next();
    }
    end_statement();
    return table;
  }

  std::vector<Subset> parse_cover_line(const std::vector<BlockFeature>& features) {
    next();  // cover
    expect_punct(':');
    std::vector<Subset> seeds;
    while (true) {
      expect_punct('{');
      std::vector<std::string> members;
      if (!at_punct('}')) {
        while (true) {
          const Token f = expect_name("feature name");
          if (!lookup(features, f.text)) fail(f, "unknown feature '" + f.text + "'");
          members.push_back(f.text);
          if (at_punct('}')) break;
          expect_punct(',');
        }
      }
      next();
      seeds.push_back(Subset(std::move(members)));
      if (!at_punct(',')) break;
      next();
    }
    end_statement();
    return seeds;
  }

  bool at_block_statement() const {
    return at_word("feature") || at_word("cover") || at_word("allow") || at_word("forbid") ||
           at_word("sections");
  }

  void parse_model_block() {
    next();  // model
    const Token name = expect_name("model name");
    define(name, NameKind::model);
    end_statement();
    std::vector<BlockFeature> features;
    Model m;
    m.name = name.text;
    while (at_block_statement()) {
      const Token& head = peek();
      if (head.text == "feature") {
        if (!m.tables.empty() || !m.cover_seeds.empty())
          fail(head, "features must be declared before cover and constraint lines");
        parse_feature_line(features);
      } else if (head.text == "cover") {
        auto seeds = parse_cover_line(features);
        m.cover_seeds.insert(m.cover_seeds.end(), seeds.begin(), seeds.end());
      } else if (head.text == "sections") {
        fail(head, "'sections' lines belong in a presheaf block");
      } else {
        next();
        m.tables.push_back(parse_table_body(
            features, head.text == "allow" ? Polarity::allow : Polarity::forbid));
      }
    }
    if (features.empty()) fail(name, "model '" + name.text + "' declares no features");
    for (auto& f : features) m.fibers.push_back(std::move(f.fiber));
    normalize(m);
    ws_->order.emplace_back(Workspace::ItemKind::model, ws_->models.size());
    ws_->models.push_back(std::move(m));
  }

  void parse_presheaf_block() {
    next();  // presheaf
    const Token name = expect_name("presheaf name");
    define(name, NameKind::presheaf);
    end_statement();
    std::vector<BlockFeature> features;
    ListedPresheaf p;
    p.name = name.text;
    while (at_word("feature") || at_word("sections")) {
      if (at_word("feature")) {
        if (!p.listed.empty()) fail(peek(), "features must be declared before sections lines");
        parse_feature_line(features);
      } else {
        next();
        p.listed.push_back(parse_table_body(features, Polarity::allow));
      }
    }
    if (at_block_statement())
      fail(peek(), "'" + peek().text + "' is not allowed in a presheaf block");
    if (features.empty()) fail(name, "presheaf '" + name.text + "' declares no features");
    for (auto& f : features) p.fibers.push_back(std::move(f.fiber));
    std::sort(p.listed.begin(), p.listed.end());
    ws_->order.emplace_back(Workspace::ItemKind::presheaf, ws_->presheaves.size());
    ws_->presheaves.push_back(std::move(p));
  }

  // -- workspace statements -------------------------------------------------

  void parse_include() {
    const Token kw = next();
    if (peek().kind != Tok::string) fail(peek(), "expected a quoted path, found " + describe(peek()));
    const Token path = next();
    end_statement();
    namespace fs = std::filesystem;
    fs::path resolved = path.text;
    if (resolved.is_relative() && !file_.empty())
      resolved = fs::path(file_).parent_path() / resolved;
    const std::string key = resolved.lexically_normal().string();
    if (std::find(include_stack_->begin(), include_stack_->end(), key) != include_stack_->end())
      fail(path, "include cycle through \"" + path.text + "\"");
    std::string text;
    try {
      text = (*loader_)(key);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      fail(path, "cannot include \"" + path.text + "\": " + e.what());
    }
    include_stack_->push_back(key);
    Parser inner(text, key, loader_, include_stack_, ws_, names_);
    inner.parse_all(false);
    include_stack_->pop_back();
    (void)kw;
  }

  void parse_identify() {
    next();  // identify
    const Token name = expect_name("identification name");
    expect_punct(':');
    const Token target = expect_name("target model");
    require(target, {NameKind::model, NameKind::derived}, "model");
    expect_arrow();
    const Token source = expect_name("source model");
    require(source, {NameKind::model, NameKind::derived}, "model");
    define(name, NameKind::identification);
    FeatureIdentification h{name.text, target.text, source.text, {}};
    expect_punct('{');
    skip_newlines();
    while (!at_punct('}')) {
      expect_keyword("feature");
      const Token tf = expect_name("target feature");
      expect_arrow();
      const Token sf = expect_name("source feature");
      for (const auto& c : h.features) {
        if (c.target == tf.text) fail(tf, "target feature '" + tf.text + "' mapped twice");
        if (c.source == sf.text)
          fail(sf, "identification is not injective: '" + sf.text + "' is hit twice");
      }
      FeatureCorrespondence c{tf.text, sf.text, {}};
      expect_punct('{');
      skip_newlines();
      while (!at_punct('}')) {
        const Token tv = expect_word("target value");
        for (const auto& [v, w] : c.values)
          if (v == tv.text) fail(tv, "value '" + tv.text + "' mapped twice");
        expect_arrow();
        const Token sv = expect_word("source value");
        c.values.emplace_back(tv.text, sv.text);
        skip_newlines();
        if (at_punct(',')) {
          next();
          skip_newlines();
        } else if (!at_punct('}')) {
          fail(peek(), "expected ',' or '}', found " + describe(peek()));
        }
      }
      next();
      if (c.values.empty()) fail(tf, "empty value map for '" + tf.text + "'");
      h.features.push_back(std::move(c));
      skip_newlines();
    }
    next();
    end_statement();
    ws_->order.emplace_back(Workspace::ItemKind::identification, ws_->identifications.size());
    ws_->identifications.push_back(std::move(h));
  }

  void parse_merge() {
    const Token kw = next();
    const Token result = expect_name("result name");
    expect_punct('=');
    const Token left = expect_name("model");
    require(left, {NameKind::model, NameKind::derived}, "model");
    expect_punct('+');
    const Token right = expect_name("model");
    require(right, {NameKind::model, NameKind::derived}, "model");
    define(result, NameKind::derived);
    end_statement();
    Directive d;
    d.kind = Directive::Kind::merge;
    d.result = result.text;
    d.left = left.text;
    d.right = right.text;
    d.span = kw.span;
    push(std::move(d));
  }

  void parse_transfer_or_check() {
    const Token kw = next();
    const bool is_check = kw.text == "check";
    const Token result = expect_name(is_check ? "model" : "result name");
    if (is_check) require(result, {NameKind::model, NameKind::derived}, "model");
    expect_punct('=');
    const Token ident = expect_name("identification");
    require(ident, {NameKind::identification}, "identification");
    expect_keyword("of");
    const Token operand = expect_name("model");
    require(operand, {NameKind::model, NameKind::derived}, "model");
    if (!is_check) define(result, NameKind::derived);
    end_statement();
    Directive d;
    d.kind = is_check ? Directive::Kind::check : Directive::Kind::transfer;
    d.result = result.text;
    d.identification = ident.text;
    d.operand = operand.text;
    d.span = kw.span;
    push(std::move(d));
  }

  void push(Directive d) {
    ws_->order.emplace_back(Workspace::ItemKind::directive, ws_->directives.size());
    ws_->directives.push_back(std::move(d));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::string file_;
  const IncludeLoader* loader_;
  std::vector<std::string>* include_stack_;
  Workspace* ws_;
  std::map<std::string, Defined>* names_;
};

// ----------------------------------------------------------------------------
// Serializer

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

void write_fiber(std::ostringstream& os, const Fiber& f) {
  os << "feature " << f.feature << ": ";
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (i) os << " | ";
    os << f.values[i];
    if (i < f.labels.size() && !f.labels[i].empty()) os << " label " << quote(f.labels[i]);
  }
  os << '\n';
}

void write_table(std::ostringstream& os, std::string_view keyword, const ConstraintTable& t) {
  os << keyword << " (" << join(t.scope.members(), ", ") << "):";
  bool first = true;
  for (const auto& tuple : t.tuples) {
    os << (first ? " " : ", ") << "(" << join(tuple, ", ") << ")";
    first = false;
  }
  os << '\n';
}

void write_model(std::ostringstream& os, const Model& m) {
  Model c = m;
  normalize(c);
  os << "model " << c.name << '\n';
  for (const auto& f : c.fibers) write_fiber(os, f);
  if (!c.cover_seeds.empty()) {
    std::vector<std::string> seeds;
    for (const auto& s : c.cover_seeds) seeds.push_back("{" + join(s.members(), ", ") + "}");
    os << "cover: " << join(seeds, ", ") << '\n';
  }
  for (const auto& t : c.tables) write_table(os, to_string(t.polarity), t);
}

void write_presheaf(std::ostringstream& os, const ListedPresheaf& p) {
  os << "presheaf " << p.name << '\n';
  for (const auto& f : p.fibers) write_fiber(os, f);
  auto listed = p.listed;
  std::sort(listed.begin(), listed.end());
  for (const auto& t : listed) write_table(os, "sections", t);
}

void write_identification(std::ostringstream& os, const FeatureIdentification& h) {
  os << "identify " << h.name << ": " << h.target_model << " -> " << h.source_model << " {\n";
  for (const auto& c : h.features) {
    std::vector<std::string> pairs;
    for (const auto& [tv, sv] : c.values) pairs.push_back(tv + " -> " + sv);
    os << "  feature " << c.target << " -> " << c.source << " { " << join(pairs, ", ") << " }\n";
  }
  os << "}\n";
}

void write_directive(std::ostringstream& os, const Directive& d) {
  switch (d.kind) {
    case Directive::Kind::merge:
      os << "merge " << d.result << " = " << d.left << " + " << d.right << '\n';
      break;
    case Directive::Kind::transfer:
      os << "transfer " << d.result << " = " << d.identification << " of " << d.operand << '\n';
      break;
    case Directive::Kind::check:
      os << "check " << d.result << " = " << d.identification << " of " << d.operand << '\n';
      break;
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Model parse_model(std::string_view text, const std::string& file) {
  Workspace ws;
  std::map<std::string, Defined> names;
  std::vector<std::string> stack;
  IncludeLoader none = [](const std::string&) -> std::string { return {}; };
  Parser(text, file, &none, &stack, &ws, &names).parse_all(true);
  if (ws.models.size() != 1)
    throw ParseError(file, SourceSpan{1, 1, 0},
                     "expected exactly one model, found " + std::to_string(ws.models.size()));
  return ws.models.front();
}

Workspace parse_workspace(std::string_view text, const std::string& file,
                          const IncludeLoader& loader) {
  Workspace ws;
  std::map<std::string, Defined> names;
  std::vector<std::string> stack;
  if (!file.empty()) stack.push_back(std::filesystem::path(file).lexically_normal().string());
  Parser(text, file, &loader, &stack, &ws, &names).parse_all(false);
  return ws;
}

Workspace load_workspace(const std::string& path) {
  return parse_workspace(read_file(path), path);
}

std::string serialize(const Model& m) {
  std::ostringstream os;
  os << "format 1\n\n";
  write_model(os, m);
  return os.str();
}

std::string serialize(const Workspace& w) {
  std::ostringstream os;
  os << "format 1\n";
  bool previous_directive = false;
  for (const auto& [kind, idx] : w.order) {
    const bool directive = kind == Workspace::ItemKind::directive;
    if (!(directive && previous_directive)) os << '\n';
    switch (kind) {
      case Workspace::ItemKind::model: write_model(os, w.models[idx]); break;
      case Workspace::ItemKind::presheaf: write_presheaf(os, w.presheaves[idx]); break;
      case Workspace::ItemKind::identification:
        write_identification(os, w.identifications[idx]);
        break;
      case Workspace::ItemKind::directive: write_directive(os, w.directives[idx]); break;
    }
    previous_directive = directive;
  }
  return os.str();
}

std::string canonicalize(std::string_view text, const std::string& file) {
  return serialize(parse_workspace(text, file));
}

}  // namespace psh
