#include "asp/surface.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <type_traits>
#include <unordered_set>

#include "term_internal.hpp"

namespace asp {

const ProcDecl* SourceFile::find_proc(std::string_view name) const {
  for (const auto& d : declarations) {
    if (const auto* p = std::get_if<ProcDecl>(&d); p != nullptr && p->name == name) return p;
  }
  return nullptr;
}

std::string format_diagnostic(const Diagnostic& d, std::string_view text, std::string_view path) {
  std::size_t line = 1;
  std::size_t line_start = 0;
  const std::size_t at = std::min(d.span.begin, text.size());
  for (std::size_t i = 0; i < at; ++i) {
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  std::size_t line_end = text.find('\n', line_start);
  if (line_end == std::string_view::npos) line_end = text.size();
  const std::size_t col = at - line_start + 1;
  std::string out = std::string(path) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                    ": " + (d.severity == Severity::kError ? "error" : "warning") + ": " +
                    d.message + "\n";
  out += "  " + std::string(text.substr(line_start, line_end - line_start)) + "\n";
  const std::size_t width =
      std::max<std::size_t>(1, std::min(d.span.end, line_end) - std::min(at, line_end));
  out += "  " + std::string(col - 1, ' ') + std::string(width, '^') + "\n";
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok : std::uint8_t { kIdent, kInt, kString, kChannel, kPunct, kEof };

struct Token {
  Tok kind = Tok::kEof;
  std::string text;  // identifier, punctuation, or decoded string
  std::int64_t number = 0;
  ChannelId channel = 0;
  std::optional<Polarity> polarity;
  Span span;
};

struct SyntaxError {
  Diagnostic diag;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto error = [&](std::size_t b, std::size_t e, std::string msg) {
    throw SyntaxError{Diagnostic{Severity::kError, {b, e}, std::move(msg)}};
  };
  auto ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.span.begin = i;
    if (c == 'k' && i + 1 < src.size() && src[i + 1] == '#') {
      std::size_t j = i + 2;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])) != 0) ++j;
      if (j == i + 2) error(i, j, "expected a channel number after 'k#'");
      std::uint64_t id = 0;
      auto res = std::from_chars(src.data() + i + 2, src.data() + j, id);
      if (res.ec != std::errc() || id > std::numeric_limits<ChannelId>::max()) {
        error(i, j, "channel number out of range");
      }
      t.kind = Tok::kChannel;
      t.channel = static_cast<ChannelId>(id);
      if (j < src.size() && (src[j] == '+' || src[j] == '-')) {
        t.polarity = src[j] == '+' ? Polarity::kPlus : Polarity::kMinus;
        ++j;
      }
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Tok::kIdent;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])) != 0) ++j;
      std::int64_t v = 0;
      auto res = std::from_chars(src.data() + i, src.data() + j, v);
      if (res.ec != std::errc()) error(i, j, "integer literal out of range");
      t.kind = Tok::kInt;
      t.number = v;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string val;
      for (;;) {
        if (j >= src.size() || src[j] == '\n') error(i, j, "unterminated string literal");
        if (src[j] == '"') break;
        if (src[j] == '\\') {
          if (j + 1 >= src.size()) error(i, j, "unterminated string literal");
          const char e = src[j + 1];
          if (e == 'n') {
            val += '\n';
          } else if (e == '"' || e == '\\') {
            val += e;
          } else {
            error(j, j + 2, "unknown escape sequence");
          }
          j += 2;
        } else {
          val += src[j++];
        }
      }
      t.kind = Tok::kString;
      t.text = std::move(val);
      i = j + 1;
    } else {
      static const char* const kTwo[] = {"||", "!!", "??"};
      t.kind = Tok::kPunct;
      bool matched = false;
      for (const char* two : kTwo) {
        if (src.substr(i, 2) == two) {
          t.text = two;
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        static const std::string_view kOne = "(){}[].,;:|&+-/=!?$@*<>";
        if (kOne.find(c) == std::string_view::npos) {
          error(i, i + 1, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
        ++i;
      }
    }
    t.span.end = i;
    out.push_back(std::move(t));
  }
  Token eof;
  eof.span = {src.size(), src.size()};
  out.push_back(eof);
  return out;
}

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k = {
      "request", "accept", "loc",  "update", "send", "recv",   "throw",  "catch",
      "case",    "sel",    "if",   "then",   "else", "close",  "new",    "and",
      "true",    "false",  "type", "name",   "var",  "locinterface", "procinterface",
      "proc",    "main",   "end",  "dual",   "inf",  "un",     "lin",    "int",
      "bool",    "str"};
  return k;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts) : src_(src), toks_(lex(src)), opts_(opts) {}

  SourceFile file() {
    SourceFile f;
    bool have_main = false;
    while (!at_eof()) {
      const Token& kw = peek();
      if (kw.kind != Tok::kIdent) fail(kw, "expected a declaration");
      if (kw.text == "type") {
        next();
        std::string n = ident("type name");
        expect("=");
        SessionType t = type();
        expect(";");
        aliases_.emplace_back(n, t);
        f.declarations.emplace_back(TypeDecl{n, t});
      } else if (kw.text == "name") {
        next();
        const Token& at = peek();
        Name n(ident("service name"));
        expect(":");
        expect("<");
        ServiceType st;
        st.server = type();
        st.server_qualifier = qualifier();
        expect(",");
        st.client = type();
        st.client_qualifier = qualifier();
        expect(">");
        expect(";");
        if (dual(st.server) != st.client) {
          error(at.span, "the two sides of service '" + n.str() + "' are not dual");
        }
        services_.insert(n);
        f.declarations.emplace_back(NameDecl{n, st});
      } else if (kw.text == "var") {
        next();
        Name n(ident("variable name"));
        expect(":");
        BasicType b = basic();
        expect(";");
        globals_.insert(n);
        f.declarations.emplace_back(VarDecl{n, b});
      } else if (kw.text == "locinterface") {
        next();
        LocationName l(ident("location name"));
        expect(":");
        Interface i = interface();
        expect(";");
        f.declarations.emplace_back(LocInterfaceDecl{l, i});
      } else if (kw.text == "procinterface") {
        next();
        expect("$");
        ProcessVarName x(ident("process variable"));
        expect(":");
        Interface i = interface();
        expect(";");
        f.declarations.emplace_back(ProcInterfaceDecl{x, i});
      } else if (kw.text == "proc") {
        next();
        const Token& at = peek();
        std::string n = ident("process name");
        if (templates_.contains(n)) error(at.span, "process '" + n + "' is defined twice");
        std::vector<Name> params;
        if (accept("(")) {
          if (!check(")")) {
            do {
              params.emplace_back(ident("parameter"));
            } while (accept(","));
          }
          expect(")");
        }
        expect("=");
        for (const auto& p : params) {
          endpoints_.push_back(p);
          values_.push_back(p);
        }
        Process body = process();
        endpoints_.clear();
        values_.clear();
        expect(";");
        templates_[n] = Template{body, params};
        f.declarations.emplace_back(ProcDecl{n, params, body});
      } else if (kw.text == "main") {
        next();
        if (have_main) fail(kw, "'main' is defined twice");
        expect("=");
        Process body = process();
        expect(";");
        have_main = true;
        f.main = body;
        f.declarations.emplace_back(MainDecl{body});
      } else {
        fail(kw, "expected a declaration, found '" + kw.text + "'");
      }
    }
    if (!have_main) {
      error({src_.size(), src_.size()}, "missing main: the file declares no 'main' process");
    }
    f.aliases = aliases_;
    for (const auto& d : f.declarations) {
      if (const auto* n = std::get_if<NameDecl>(&d)) f.gamma.services[n->name] = n->type;
      if (const auto* v = std::get_if<VarDecl>(&d)) f.gamma.vars[v->name] = v->sort;
      if (const auto* l = std::get_if<LocInterfaceDecl>(&d)) f.theta.locations[l->loc] = l->interface;
      if (const auto* x = std::get_if<ProcInterfaceDecl>(&d)) {
        f.theta.process_vars[x->var] = x->interface;
      }
    }
    f.spans = std::move(spans_);
    return f;
  }

  Process lone_process() {
    snippet_ = true;
    Process p = process();
    if (!at_eof()) fail(peek(), "unexpected '" + describe(peek()) + "' after process");
    return p;
  }

  SessionType lone_type(const TypeAliases& aliases) {
    aliases_ = aliases;
    SessionType t = type();
    if (!at_eof()) fail(peek(), "unexpected '" + describe(peek()) + "' after type");
    return t;
  }

  Diagnostics& diagnostics() { return diags_; }

 private:
  struct Template {
    Process body;
    std::vector<Name> params;
  };

  // Token plumbing.
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_eof() const { return peek().kind == Tok::kEof; }
  bool check(std::string_view p) const {
    const Token& t = peek();
    return (t.kind == Tok::kPunct || t.kind == Tok::kIdent) && t.text == p;
  }
  bool accept(std::string_view p) {
    if (!check(p)) return false;
    next();
    return true;
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::kEof:
        return "end of input";
      case Tok::kString:
        return "\"" + t.text + "\"";
      case Tok::kChannel:
        return "k#" + std::to_string(t.channel);
      default:
        return t.text;
    }
  }
  [[noreturn]] void fail(const Token& t, std::string msg) {
    throw SyntaxError{Diagnostic{Severity::kError, t.span, std::move(msg)}};
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail(peek(), "expected '" + std::string(p) + "', found '" + describe(peek()) + "'");
  }
  std::string ident(std::string_view what) {
    const Token& t = peek();
    if (t.kind != Tok::kIdent || keywords().contains(t.text)) {
      fail(t, "expected " + std::string(what) + ", found '" + describe(t) + "'");
    }
    return next().text;
  }
  void error(Span s, std::string msg) {
    diags_.push_back(Diagnostic{Severity::kError, s, std::move(msg)});
  }
  std::size_t last_end() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].span.end; }

  Process mark(Process p, std::size_t begin) {
    spans_.emplace(p.get(), Span{begin, last_end()});
    return p;
  }

  // Types.
  SessionType type() {
    const Token& t = peek();
    if (accept("end")) return SessionType::end();
    if (accept("(")) {
      SessionType inner = type();
      expect(")");
      return inner;
    }
    if (accept("dual")) {
      expect("(");
      SessionType inner = type();
      expect(")");
      return asp::dual(inner);
    }
    if (accept("!!")) return delegation(true);
    if (accept("??")) return delegation(false);
    if (accept("!")) {
      if (accept("!")) return delegation(true);
      return communication(true);
    }
    if (accept("?")) {
      if (accept("?")) return delegation(false);
      return communication(false);
    }
    if (accept("&")) return SessionType::branch(arms());
    if (accept("+")) return SessionType::select(arms());
    if (t.kind == Tok::kIdent && !keywords().contains(t.text)) {
      for (const auto& [n, a] : aliases_) {
        if (n == t.text) {
          next();
          return a;
        }
      }
      fail(t, "unknown type '" + t.text + "'");
    }
    fail(t, "expected a session type, found '" + describe(t) + "'");
  }

  SessionType communication(bool out) {
    expect("(");
    std::vector<BasicType> sorts;
    if (!check(")")) {
      do {
        sorts.push_back(basic());
      } while (accept(","));
    }
    expect(")");
    expect(".");
    SessionType cont = type();
    return out ? SessionType::send(std::move(sorts), cont)
               : SessionType::receive(std::move(sorts), cont);
  }

  SessionType delegation(bool out) {
    expect("(");
    SessionType d = type();
    expect(")");
    expect(".");
    SessionType cont = type();
    return out ? SessionType::throw_(d, cont) : SessionType::catch_(d, cont);
  }

  std::map<Label, SessionType> arms() {
    expect("{");
    std::map<Label, SessionType> out;
    do {
      const Token& at = peek();
      Label l(label());
      expect(":");
      if (!out.emplace(l, type()).second) fail(at, "label '" + l.str() + "' appears twice");
    } while (accept(","));
    expect("}");
    return out;
  }

  std::string label() {
    const Token& t = peek();
    if (t.kind != Tok::kIdent) fail(t, "expected a label, found '" + describe(t) + "'");
    return next().text;
  }

  BasicType basic() {
    const Token& t = peek();
    if (accept("int")) return BasicType::kInt;
    if (accept("bool")) return BasicType::kBool;
    if (accept("str")) return BasicType::kStr;
    fail(t, "expected int, bool or str, found '" + describe(t) + "'");
  }

  Qualifier qualifier() {
    const Token& t = peek();
    if (accept("un")) return Qualifier::kUn;
    if (accept("lin")) return Qualifier::kLin;
    fail(t, "expected 'un' or 'lin', found '" + describe(t) + "'");
  }

  Interface interface() {
    expect("{");
    Interface out;
    if (!check("}")) {
      do {
        Name n(ident("service name"));
        expect(":");
        SessionType t = type();
        expect("@");
        Multiplicity m;
        const Token& mt = peek();
        if (accept("inf")) {
          m = Multiplicity::infinite();
        } else if (mt.kind == Tok::kInt) {
          m = Multiplicity(static_cast<std::uint64_t>(next().number));
        } else {
          fail(mt, "expected a multiplicity (a number or 'inf')");
        }
        out.add(n, t, m);
      } while (accept(","));
    }
    expect("}");
    return out;
  }

  // Expressions: and < = < +,- < /.
  Expression expr() { return conj(); }

  Expression conj() {
    Expression l = equality();
    while (accept("and")) l = Expression::binary(BinOp::kAnd, l, equality());
    return l;
  }
  Expression equality() {
    Expression l = additive();
    while (accept("=")) l = Expression::binary(BinOp::kEq, l, additive());
    return l;
  }
  Expression additive() {
    Expression l = multiplicative();
    for (;;) {
      if (accept("+")) {
        l = Expression::binary(BinOp::kAdd, l, multiplicative());
      } else if (accept("-")) {
        l = Expression::binary(BinOp::kSub, l, multiplicative());
      } else {
        return l;
      }
    }
  }
  Expression multiplicative() {
    Expression l = atom();
    while (accept("/")) l = Expression::binary(BinOp::kDiv, l, atom());
    return l;
  }
  Expression atom() {
    const Token& t = peek();
    if (accept("(")) {
      Expression e = expr();
      expect(")");
      return e;
    }
    if (accept("true")) return Expression::boolean(true);
    if (accept("false")) return Expression::boolean(false);
    if (t.kind == Tok::kInt) return Expression::integer(next().number);
    if (check("-") && peek(1).kind == Tok::kInt) {
      next();
      const Token& n = next();
      return Expression::integer(-n.number);
    }
    if (t.kind == Tok::kString) return Expression::string(next().text);
    if (t.kind == Tok::kIdent && !keywords().contains(t.text)) {
      Name n(next().text);
      if (!value_bound(n)) error(t.span, "unbound variable '" + n.str() + "'");
      return Expression::var(n);
    }
    fail(t, "expected an expression, found '" + describe(t) + "'");
  }

  // Scopes.
  bool value_bound(const Name& n) const {
    return opts_.allow_free_names || globals_.contains(n) ||
           std::find(values_.begin(), values_.end(), n) != values_.end();
  }
  bool endpoint_bound(const Name& n) const {
    return opts_.allow_free_names ||
           std::find(endpoints_.begin(), endpoints_.end(), n) != endpoints_.end();
  }

  Endpoint endpoint() {
    const Token& t = peek();
    if (t.kind == Tok::kChannel) {
      next();
      if (!t.polarity) fail(t, "a channel endpoint needs a polarity, as in k#" +
                                   std::to_string(t.channel) + "+");
      if (!opts_.allow_free_channels &&
          std::find(channels_.begin(), channels_.end(), t.channel) == channels_.end()) {
        error(t.span, "channel k#" + std::to_string(t.channel) + " is not bound by 'new'");
      }
      return Channel{t.channel, *t.polarity};
    }
    Name n(ident("a session endpoint"));
    if (!endpoint_bound(n)) error(t.span, "unbound session name '" + n.str() + "'");
    return n;
  }

  Name service() {
    const Token& t = peek();
    Name n(ident("service name"));
    if (!snippet_ && !services_.contains(n)) {
      error(t.span, "service '" + n.str() + "' is not declared");
    }
    return n;
  }

  // Continuation after a prefix: `. P`, or nothing for 0.
  Process cont(std::string_view sep = ".") {
    if (accept(sep)) return unit();
    return inaction();
  }

  // Processes. `|` is right-associative and binds loosest.
  Process process() {
    const std::size_t begin = peek().span.begin;
    Process left = unit();
    if (accept("|")) return mark(parallel(left, process()), begin);
    return left;
  }

  Process with_endpoint_binder(const Name& x, const std::function<Process()>& body) {
    endpoints_.push_back(x);
    Process p = body();
    endpoints_.pop_back();
    return p;
  }

  Process unit() {
    const Token& t = peek();
    const std::size_t begin = t.span.begin;
    if (accept("(")) {
      Process p = process();
      expect(")");
      return p;
    }
    if (t.kind == Tok::kInt && t.number == 0) {
      next();
      return inaction();
    }
    if (accept("$")) {
      ProcessVarName x(ident("process variable"));
      if (update_depth_ == 0) error({begin, last_end()}, "process variable '$" + x.str() +
                                                             "' occurs outside an update");
      return mark(process_var(x), begin);
    }
    if (t.kind != Tok::kIdent) fail(t, "expected a process, found '" + describe(t) + "'");
    const std::string kw = t.text;
    if (kw == "request" || kw == "accept") {
      next();
      const bool replicated = kw == "accept" && accept("*");
      Name a = service();
      expect("(");
      Name x(ident("session variable"));
      expect(")");
      Process body = with_endpoint_binder(x, [&] { return cont(); });
      if (kw == "request") return mark(request(a, x, body), begin);
      return mark(replicated ? replicated_accept(a, x, body) : accept_(a, x, body), begin);
    }
    if (kw == "loc") {
      next();
      LocationName l(ident("location name"));
      std::uint32_t h = 0;
      if (accept("@")) {
        const Token& n = peek();
        if (n.kind != Tok::kInt) fail(n, "expected an annotation");
        h = static_cast<std::uint32_t>(next().number);
      }
      expect("[");
      Process body = check("]") ? inaction() : process();
      expect("]");
      return mark(located(l, h, body), begin);
    }
    if (kw == "update") {
      next();
      LocationName l(ident("location name"));
      expect("{");
      ++update_depth_;
      Process body = check("}") ? inaction() : process();
      --update_depth_;
      expect("}");
      return mark(update(l, body), begin);
    }
    if (kw == "send") {
      next();
      Endpoint k = endpoint();
      expect("(");
      std::vector<Expression> payload;
      if (!check(")")) {
        do {
          payload.push_back(expr());
        } while (accept(","));
      }
      expect(")");
      return mark(send(k, std::move(payload), cont()), begin);
    }
    if (kw == "recv") {
      next();
      Endpoint k = endpoint();
      expect("(");
      std::vector<Name> xs;
      if (!check(")")) {
        do {
          xs.emplace_back(ident("variable"));
        } while (accept(","));
      }
      expect(")");
      for (const auto& x : xs) values_.push_back(x);
      Process body = cont();
      values_.resize(values_.size() - xs.size());
      return mark(receive(k, std::move(xs), body), begin);
    }
    if (kw == "throw") {
      next();
      Endpoint k = endpoint();
      expect("(");
      Endpoint d = endpoint();
      expect(")");
      return mark(throw_(k, d, cont()), begin);
    }
    if (kw == "catch") {
      next();
      Endpoint k = endpoint();
      expect("(");
      Name x(ident("session variable"));
      expect(")");
      Process body = with_endpoint_binder(x, [&] { return cont(); });
      return mark(catch_(k, x, body), begin);
    }
    if (kw == "case") {
      next();
      Endpoint k = endpoint();
      expect("{");
      std::map<Label, Process> arms;
      do {
        const Token& at = peek();
        Label l(label());
        expect(":");
        Process arm = process();
        if (!arms.emplace(l, arm).second) fail(at, "label '" + l.str() + "' appears twice");
      } while (accept("||"));
      expect("}");
      return mark(branch(k, std::move(arms)), begin);
    }
    if (kw == "sel") {
      next();
      Endpoint k = endpoint();
      expect(".");
      SelectLabel l;
      if (accept("(")) {
        l = expr();
        expect(")");
      } else {
        l = Label(label());
      }
      return mark(select(k, std::move(l), cont(";")), begin);
    }
    if (kw == "if") {
      next();
      Expression c = expr();
      expect("then");
      Process a = unit();
      expect("else");
      Process b = unit();
      return mark(conditional(c, a, b), begin);
    }
    if (kw == "close") {
      next();
      Endpoint k = endpoint();
      return mark(close(k, cont()), begin);
    }
    if (kw == "new") {
      next();
      expect("(");
      const Token& c = peek();
      if (c.kind != Tok::kChannel || c.polarity) fail(c, "expected a channel such as k#1");
      next();
      expect(")");
      channels_.push_back(c.channel);
      Process body = unit();
      channels_.pop_back();
      return mark(restrict(c.channel, body), begin);
    }
    if (!keywords().contains(kw)) {
      next();
      auto it = templates_.find(kw);
      if (it == templates_.end()) {
        error(t.span, "unknown process '" + kw + "'");
        return inaction();
      }
      for (const auto& p : it->second.params) {
        if (!endpoint_bound(p) && !value_bound(p)) {
          error(t.span, "process '" + kw + "' needs '" + p.str() + "' to be bound here");
        }
      }
      return it->second.body;
    }
    fail(t, "expected a process, found '" + kw + "'");
  }

  static Process accept_(Name a, Name x, Process body) {
    return asp::accept(std::move(a), std::move(x), std::move(body));
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  bool snippet_ = false;
  Diagnostics diags_;

  TypeAliases aliases_;
  std::set<Name> services_;
  std::set<Name> globals_;
  std::map<std::string, Template> templates_;
  std::vector<Name> endpoints_;
  std::vector<Name> values_;
  std::vector<ChannelId> channels_;
  int update_depth_ = 0;
  std::unordered_map<const ProcNode*, Span> spans_;
};

// ---------------------------------------------------------------------------
// Printer

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += c;
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out + "\"";
}

int precedence(BinOp op) {
  switch (op) {
    case BinOp::kAnd:
      return 1;
    case BinOp::kEq:
      return 2;
    case BinOp::kAdd:
    case BinOp::kSub:
      return 3;
    case BinOp::kDiv:
      return 4;
  }
  return 0;
}

const char* op_text(BinOp op) {
  switch (op) {
    case BinOp::kAnd:
      return "and";
    case BinOp::kEq:
      return "=";
    case BinOp::kAdd:
      return "+";
    case BinOp::kSub:
      return "-";
    case BinOp::kDiv:
      return "/";
  }
  return "?";
}

void print_expr(const Expression& e, std::string& out) {
  std::visit(detail::Overloaded{
                 [&](const ExprConst& c) {
                   if (const auto* i = std::get_if<std::int64_t>(&c.value)) {
                     out += std::to_string(*i);
                   } else if (const auto* b = std::get_if<bool>(&c.value)) {
                     out += *b ? "true" : "false";
                   } else {
                     out += quote(std::get<std::string>(c.value));
                   }
                 },
                 [&](const ExprVar& v) { out += v.name.str(); },
                 [&](const ExprBinary& b) {
                   const int p = precedence(b.op);
                   auto side = [&](const Expression& s, bool right) {
                     const auto* sb = std::get_if<ExprBinary>(&s.node().v);
                     const bool paren =
                         sb != nullptr && (precedence(sb->op) < p || (right && precedence(sb->op) == p));
                     if (paren) out += '(';
                     print_expr(s, out);
                     if (paren) out += ')';
                   };
                   side(b.lhs, false);
                   out += ' ';
                   out += op_text(b.op);
                   out += ' ';
                   side(b.rhs, true);
                 },
             },
             e.node().v);
}

class ProcPrinter {
 public:
  explicit ProcPrinter(const std::unordered_map<const ProcNode*, std::string>* names = nullptr)
      : names_(names) {}

  std::string run(const Process& p) {
    out_.clear();
    proc(p);
    return out_;
  }

  // Top-level parallel components, each printed on its own.
  std::vector<std::string> components(const Process& p) {
    std::vector<std::string> out;
    Process cur = p;
    while (const auto* par = cur.as<Parallel>()) {
      if (folded(cur)) break;
      out.push_back(run(par->left));
      if (par->left.is<Parallel>() && !folded(par->left)) out.back() = "(" + out.back() + ")";
      cur = par->right;
    }
    out.push_back(run(cur));
    return out;
  }

 private:
  bool folded(const Process& p) const {
    return names_ != nullptr && names_->contains(p.get());
  }

  void ep(const Endpoint& e) { out_ += print(e); }

  void cont(const Process& c, const char* sep = ". ") {
    if (c.is<Inaction>() && !folded(c)) return;
    out_ += sep;
    unit(c);
  }

  // A process in a position that does not allow a bare `|`.
  void unit(const Process& p) {
    if (p.is<Parallel>() && !folded(p)) {
      out_ += '(';
      proc(p);
      out_ += ')';
    } else {
      proc(p);
    }
  }

  void proc(const Process& p) {
    if (folded(p)) {
      out_ += names_->at(p.get());
      return;
    }
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Request> || std::is_same_v<T, Accept> ||
                        std::is_same_v<T, ReplicatedAccept>) {
            out_ += std::is_same_v<T, Request>  ? "request "
                    : std::is_same_v<T, Accept> ? "accept "
                                                : "accept* ";
            out_ += n.service.str() + "(" + n.binder.str() + ")";
            cont(n.body);
          } else if constexpr (std::is_same_v<T, Located>) {
            out_ += "loc " + n.loc.str();
            if (n.annotation != 0) out_ += " @" + std::to_string(n.annotation);
            out_ += " [";
            if (!n.body.template is<Inaction>() || folded(n.body)) {
              out_ += ' ';
              proc(n.body);
              out_ += ' ';
            }
            out_ += "]";
          } else if constexpr (std::is_same_v<T, ProcVar>) {
            out_ += "$" + n.name.str();
          } else if constexpr (std::is_same_v<T, Update>) {
            out_ += "update " + n.loc.str() + " {";
            if (!n.body.template is<Inaction>() || folded(n.body)) {
              out_ += ' ';
              proc(n.body);
              out_ += ' ';
            }
            out_ += "}";
          } else if constexpr (std::is_same_v<T, Send>) {
            out_ += "send ";
            ep(n.ep);
            out_ += '(';
            for (std::size_t i = 0; i < n.payload.size(); ++i) {
              if (i > 0) out_ += ", ";
              print_expr(n.payload[i], out_);
            }
            out_ += ')';
            cont(n.cont);
          } else if constexpr (std::is_same_v<T, Receive>) {
            out_ += "recv ";
            ep(n.ep);
            out_ += '(';
            for (std::size_t i = 0; i < n.binders.size(); ++i) {
              if (i > 0) out_ += ", ";
              out_ += n.binders[i].str();
            }
            out_ += ')';
            cont(n.cont);
          } else if constexpr (std::is_same_v<T, Throw>) {
            out_ += "throw ";
            ep(n.ep);
            out_ += '(';
            ep(n.delegated);
            out_ += ')';
            cont(n.cont);
          } else if constexpr (std::is_same_v<T, Catch>) {
            out_ += "catch ";
            ep(n.ep);
            out_ += "(" + n.binder.str() + ")";
            cont(n.cont);
          } else if constexpr (std::is_same_v<T, Branch>) {
            out_ += "case ";
            ep(n.ep);
            out_ += " { ";
            bool first = true;
            for (const auto& [l, arm] : n.arms) {
              if (!first) out_ += " || ";
              first = false;
              out_ += l.str() + ": ";
              proc(arm);
            }
            out_ += " }";
          } else if constexpr (std::is_same_v<T, Select>) {
            out_ += "sel ";
            ep(n.ep);
            out_ += '.';
            if (const auto* l = std::get_if<Label>(&n.label)) {
              out_ += l->str();
            } else {
              out_ += '(';
              print_expr(std::get<Expression>(n.label), out_);
              out_ += ')';
            }
            cont(n.cont, "; ");
          } else if constexpr (std::is_same_v<T, Parallel>) {
            unit(n.left);
            out_ += " | ";
            proc(n.right);
          } else if constexpr (std::is_same_v<T, Conditional>) {
            out_ += "if ";
            print_expr(n.cond, out_);
            out_ += " then ";
            unit(n.then_branch);
            out_ += " else ";
            unit(n.else_branch);
          } else if constexpr (std::is_same_v<T, Close>) {
            out_ += "close ";
            ep(n.ep);
            cont(n.cont);
          } else if constexpr (std::is_same_v<T, Restrict>) {
            out_ += "new(k#" + std::to_string(n.channel) + ") ";
            unit(n.body);
          } else {
            out_ += "0";
          }
        },
        p.node().v);
  }

  const std::unordered_map<const ProcNode*, std::string>* names_;
  std::string out_;
};

}  // namespace

ErrorOr<SourceFile, Diagnostics> parse(std::string_view text, const ParseOptions& opts) {
  try {
    Parser p(text, opts);
    SourceFile f = p.file();
    if (!p.diagnostics().empty()) return p.diagnostics();
    return f;
  } catch (const SyntaxError& e) {
    return Diagnostics{e.diag};
  }
}

ErrorOr<Process, Diagnostics> parse_process(std::string_view text, const ParseOptions& opts) {
  try {
    Parser p(text, opts);
    Process proc = p.lone_process();
    if (!p.diagnostics().empty()) return p.diagnostics();
    return proc;
  } catch (const SyntaxError& e) {
    return Diagnostics{e.diag};
  }
}

ErrorOr<SessionType, Diagnostics> parse_type(std::string_view text, const TypeAliases& aliases) {
  try {
    Parser p(text, {});
    SessionType t = p.lone_type(aliases);
    if (!p.diagnostics().empty()) return p.diagnostics();
    return t;
  } catch (const SyntaxError& e) {
    return Diagnostics{e.diag};
  }
}

std::string print(const Process& p) { return ProcPrinter().run(p); }

std::string print(const Expression& e) {
  std::string out;
  print_expr(e, out);
  return out;
}

std::string print(const SessionType& t, const TypeAliases& aliases) {
  return to_string(t, aliases);
}

std::string print(const Endpoint& e) {
  if (e.is_name()) return e.name().str();
  return "k#" + std::to_string(e.channel().id) +
         (e.channel().polarity == Polarity::kPlus ? "+" : "-");
}

std::string print(const SourceFile& f) {
  std::string out;
  std::unordered_map<const ProcNode*, std::string> names;
  TypeAliases aliases;
  auto body_text = [&](const Process& body) {
    ProcPrinter printer(&names);
    auto parts = printer.components(body);
    std::string s = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) s += "\n  | " + parts[i];
    return s;
  };
  for (const auto& d : f.declarations) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, TypeDecl>) {
            out += "type " + n.name + " = " + to_string(n.type, aliases) + ";\n";
            aliases.emplace_back(n.name, n.type);
          } else if constexpr (std::is_same_v<T, NameDecl>) {
            out += "name " + n.name.str() + " : <" + to_string(n.type.server, aliases) + " " +
                   to_string(n.type.server_qualifier) + ", " + to_string(n.type.client, aliases) +
                   " " + to_string(n.type.client_qualifier) + ">;\n";
          } else if constexpr (std::is_same_v<T, VarDecl>) {
            out += "var " + n.name.str() + " : " + to_string(n.sort) + ";\n";
          } else if constexpr (std::is_same_v<T, LocInterfaceDecl>) {
            out += "locinterface " + n.loc.str() + " : " + to_string(n.interface, aliases) +
                   ";\n";
          } else if constexpr (std::is_same_v<T, ProcInterfaceDecl>) {
            out += "procinterface $" + n.var.str() + " : " +
                   to_string(n.interface, aliases) + ";\n";
          } else if constexpr (std::is_same_v<T, ProcDecl>) {
            out += "proc " + n.name;
            if (!n.params.empty()) {
              out += "(";
              for (std::size_t i = 0; i < n.params.size(); ++i) {
                if (i > 0) out += ", ";
                out += n.params[i].str();
              }
              out += ")";
            }
            out += " =\n    " + body_text(n.body) + ";\n";
            if (!n.body.template is<Inaction>()) names.emplace(n.body.get(), n.name);
          } else {
            out += "main =\n    " + body_text(n.body) + ";\n";
          }
        },
        d);
  }
  return out;
}

}  // namespace asp
