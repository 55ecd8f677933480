#include <map>

#include "og/frontend.hpp"

namespace og {

namespace {

struct Tok {
  enum class K : std::uint8_t { Ident, Number, String, Sym, End };
  K k = K::End;
  std::string text;
  std::uint32_t num = 0;
  SrcPos pos;
};

[[noreturn]] void syntax(SrcPos pos, const std::string& msg) {
  throw ParseError(ParseErrorKind::SyntaxError, pos, msg);
}

std::vector<Tok> lex(const std::string& src) {
  std::vector<Tok> out;
  std::uint32_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Tok t;
    t.pos = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.k = Tok::K::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::uint64_t v = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        v = v * 10 + static_cast<std::uint64_t>(src[j] - '0');
        if (v > 0xffffffffULL) syntax(t.pos, "number too large");
        ++j;
      }
      t.k = Tok::K::Number;
      t.text = src.substr(i, j - i);
      t.num = static_cast<std::uint32_t>(v);
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      std::string s;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\n') syntax(t.pos, "unterminated string");
        if (src[j] == '\\' && j + 1 < src.size()) ++j;
        s.push_back(src[j++]);
      }
      if (j >= src.size()) syntax(t.pos, "unterminated string");
      t.k = Tok::K::String;
      t.text = std::move(s);
      advance(j + 1 - i);
    } else {
      static const char* two[] = {":=", "->", "&&", "||", "!=", "==", "<="};
      t.k = Tok::K::Sym;
      for (const char* s : two)
        if (src.compare(i, 2, s) == 0) t.text = s;
      if (t.text.empty()) {
        if (std::string("(){}[],;:=!<>+-#").find(c) == std::string::npos)
          syntax(t.pos, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Tok end;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

struct FnInfo {
  Op op;
  std::size_t arity;
};

const std::map<std::string, FnInfo>& functions() {
  static const std::map<std::string, FnInfo> fns{
      {"hd", {Op::Head, 1}},
      {"tl", {Op::Tail, 1}},
      {"len", {Op::Len, 1}},
      {"last", {Op::Last, 1}},
      {"butlast", {Op::ButLast, 1}},
      {"set", {Op::ToSet, 1}},
      {"nodup", {Op::NoDup, 1}},
      {"restrict", {Op::Restrict, 2}},
      {"card", {Op::Card, 1}},
      {"inter", {Op::Inter, 2}},
      {"some", {Op::SomeOf, 1}},
      {"is_some", {Op::IsSome, 1}},
      {"the", {Op::The, 1}},
      {"pair", {Op::MkPair, 2}},
      {"fst", {Op::Fst, 1}},
      {"snd", {Op::Snd, 1}},
      {"ite", {Op::Ite, 3}},
      {"interrupt_policy", {Op::Policy, 1}},
      {"sched_policy", {Op::SchedPolicy, 1}},
      {"highest_runnable", {Op::HighestRunnable, 1}},
      {"handle_events", {Op::HandleEvents, 2}},
      {"is_user", {Op::IsUser, 1}},
      {"is_interrupt", {Op::IsInterrupt, 1}},
      {"is_svc", {Op::IsSvc, 1}},
  };
  return fns;
}

const std::map<std::string, bool>& macros() {
  // name -> takes an argument
  static const std::map<std::string, bool> m{
      {"SVC_now", false},   {"SVCaRequest", false}, {"SVCaEnable", false}, {"SVCaDisable", false},
      {"IRet", false},      {"SVCaTake", false},    {"ChangeEvents", false}, {"ITake", true},
      {"IntEnable", true},  {"IntDisable", true},
  };
  return m;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  ModelFile file() {
    ModelFile m;
    expect_word("system");
    if (cur().k != Tok::K::String) syntax(cur().pos, "expected system name string");
    m.name = take().text;
    m.config_pos = cur().pos;
    expect_word("config");
    expect("{");
    while (!is("}")) m.config.push_back(config_entry());
    expect("}");
    while (cur().k != Tok::K::End) m.items.push_back(item());
    return m;
  }

  Expr expr_only() {
    auto e = expr();
    if (cur().k != Tok::K::End) syntax(cur().pos, "unexpected '" + cur().text + "' after expression");
    return e;
  }

 private:
  std::vector<Tok> toks_;
  std::size_t i_ = 0;

  const Tok& cur() const { return toks_[i_]; }
  const Tok& peek(std::size_t n = 1) const { return toks_[std::min(i_ + n, toks_.size() - 1)]; }
  Tok take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  bool is(const char* sym) const { return cur().k == Tok::K::Sym && cur().text == sym; }
  bool is_word(const char* w) const { return cur().k == Tok::K::Ident && cur().text == w; }

  bool accept(const char* sym) {
    if (!is(sym)) return false;
    take();
    return true;
  }

  std::string describe(const Tok& t) const {
    if (t.k == Tok::K::End) return "end of input";
    if (t.k == Tok::K::String) return "string";
    return "'" + t.text + "'";
  }

  void expect(const char* sym) {
    if (!is(sym)) syntax(cur().pos, std::string("expected '") + sym + "', found " + describe(cur()));
    take();
  }

  void expect_word(const char* w) {
    if (!is_word(w)) syntax(cur().pos, std::string("expected '") + w + "', found " + describe(cur()));
    take();
  }

  std::string ident(const char* what) {
    if (cur().k != Tok::K::Ident) syntax(cur().pos, std::string("expected ") + what + ", found " + describe(cur()));
    return take().text;
  }

  std::uint32_t number(const char* what) {
    if (cur().k != Tok::K::Number) syntax(cur().pos, std::string("expected ") + what + ", found " + describe(cur()));
    return take().num;
  }

  // ---- config and items

  MConfigEntry config_entry() {
    MConfigEntry e;
    e.pos = cur().pos;
    e.key = ident("config key");
    if (accept("[")) {
      e.index = number("index");
      expect("]");
    }
    expect("=");
    e.value_pos = cur().pos;
    if (cur().k == Tok::K::Number || cur().k == Tok::K::Ident) {
      e.value = take().text;
    } else if (cur().k == Tok::K::String) {
      e.value = take().text;
      e.quoted = true;
    } else {
      syntax(cur().pos, "expected config value, found " + describe(cur()));
    }
    expect(";");
    return e;
  }

  Type type() {
    auto pos = cur().pos;
    auto name = ident("type");
    if (name == "bool") return Type::boolean();
    expect("<");
    Type t;
    if (name == "nat") {
      t = Type::nat(number("bound"));
    } else if (name == "set") {
      t = Type::set(number("bound"));
    } else if (name == "stack") {
      auto elem = type();
      std::uint32_t len = 0;
      if (accept(",")) len = number("maximum length");
      t = Type::stack(std::move(elem), len);
    } else if (name == "option") {
      t = Type::option(type());
    } else if (name == "pair") {
      auto a = type();
      expect(",");
      t = Type::pair(std::move(a), type());
    } else if (name == "map") {
      auto bound = number("key bound");
      expect(",");
      t = Type::map(bound, type());
    } else {
      syntax(pos, "unknown type '" + name + "'");
    }
    expect(">");
    return t;
  }

  MItem item() {
    auto pos = cur().pos;
    if (is_word("var")) {
      take();
      MVar v;
      v.pos = pos;
      v.name = ident("variable name");
      expect(":");
      v.type = type();
      expect("=");
      v.init = expr();
      expect(";");
      return v;
    }
    if (is_word("init")) {
      take();
      MInit in;
      in.pos = cur().pos;
      in.name = ident("variable name");
      expect("=");
      in.value = expr();
      expect(";");
      return in;
    }
    if (is_word("invariant")) {
      take();
      MInvariant inv;
      inv.pos = cur().pos;
      inv.name = ident("invariant name");
      expect(":");
      inv.pred = expr();
      expect(";");
      return inv;
    }
    MTask t;
    t.pos = pos;
    if (is_word("controlled")) {
      take();
      t.controlled = true;
    }
    if (!is_word("task")) syntax(cur().pos, "expected 'var', 'init', 'task' or 'invariant', found " + describe(cur()));
    take();
    t.name = ident("task name");
    expect_word("as");
    t.routine = atom();
    t.body = block();
    return t;
  }

  // ---- statements

  std::vector<MStmt> block() {
    expect("{");
    std::vector<MStmt> out;
    while (!is("}")) {
      if (cur().k == Tok::K::End) syntax(cur().pos, "unterminated block");
      out.push_back(stmt());
    }
    expect("}");
    return out;
  }

  MAssign assignment() {
    MAssign a;
    a.pos = cur().pos;
    a.name = ident("assignment target");
    expect(":=");
    a.rhs = expr();
    return a;
  }

  std::vector<MAssign> assign_block() {
    expect("{");
    std::vector<MAssign> out;
    if (!is("}") && !is(";")) {
      out.push_back(assignment());
      while (accept(",")) out.push_back(assignment());
    }
    accept(";");
    expect("}");
    return out;
  }

  MStmt stmt() {
    MStmt s;
    s.pos = cur().pos;
    if (is_word("assert")) {
      take();
      expect("(");
      s.assertion = expr();
      expect(")");
    }
    if (cur().k == Tok::K::Ident && peek().k == Tok::K::Sym && peek().text == ":") {
      s.label = take().text;
      take();
    }
    auto pos = cur().pos;
    if (cur().k != Tok::K::Ident) syntax(pos, "expected statement, found " + describe(cur()));
    const auto& w = cur().text;
    if (w == "skip") {
      take();
      s.kind = MStmt::Kind::Skip;
      expect(";");
    } else if (w == "await") {
      take();
      s.kind = MStmt::Kind::Await;
      expect("(");
      s.cond = expr();
      expect(")");
      s.branches.push_back(assign_block());
    } else if (w == "choose") {
      take();
      s.kind = MStmt::Kind::Choose;
      s.branches.push_back(assign_block());
      if (!is_word("or")) syntax(cur().pos, "expected 'or' after choose branch");
      while (is_word("or")) {
        take();
        s.branches.push_back(assign_block());
      }
    } else if (w == "if") {
      take();
      s.kind = MStmt::Kind::If;
      expect("(");
      s.cond = expr();
      expect(")");
      s.body = block();
      if (is_word("else")) {
        take();
        s.has_else = true;
        s.else_body = block();
      }
    } else if (w == "while") {
      take();
      s.kind = MStmt::Kind::While;
      expect("(");
      s.cond = expr();
      expect(")");
      s.body = block();
    } else if (w == "controlled") {
      take();
      s.kind = MStmt::Kind::Controlled;
      s.body = block();
    } else if (macros().count(w)) {
      s.kind = MStmt::Kind::Macro;
      s.macro = take().text;
      if (macros().at(s.macro)) {
        expect("(");
        s.macro_arg = expr();
        expect(")");
      }
      expect(";");
    } else if (peek().k == Tok::K::Sym && peek().text == ":=") {
      s.kind = MStmt::Kind::Assign;
      std::vector<MAssign> as{assignment()};
      while (accept(",")) as.push_back(assignment());
      s.branches.push_back(std::move(as));
      expect(";");
    } else {
      syntax(pos, "expected statement, found " + describe(cur()));
    }
    return s;
  }

  // ---- expressions

  Expr expr() { return implies(); }

  Expr implies() {
    auto l = disj();
    if (is("->")) {
      auto pos = take().pos;
      auto r = implies();
      return ex::make(Op::Implies, {l, r}, pos);
    }
    return l;
  }

  Expr disj() {
    auto l = conj();
    while (is("||")) {
      auto pos = take().pos;
      l = ex::make(Op::Or, {l, conj()}, pos);
    }
    return l;
  }

  Expr conj() {
    auto pos = cur().pos;
    std::vector<Expr> parts{neg()};
    while (accept("&&")) parts.push_back(neg());
    if (parts.size() == 1) return parts[0];
    return ex::make(Op::And, std::move(parts), pos);
  }

  Expr neg() {
    if (is("!")) {
      auto pos = take().pos;
      return ex::make(Op::Not, {neg()}, pos);
    }
    return cmp();
  }

  Expr cmp() {
    auto l = add();
    Op op;
    if (is("=") || is("=="))
      op = Op::Eq;
    else if (is("!="))
      op = Op::Ne;
    else if (is("<"))
      op = Op::Lt;
    else if (is("<="))
      op = Op::Le;
    else if (is_word("in"))
      op = Op::Member;
    else
      return l;
    auto pos = take().pos;
    auto r = add();
    return ex::make(op, {l, r}, pos);
  }

  Expr add() {
    auto l = push();
    while (is("+") || is("-")) {
      auto t = take();
      l = ex::make(t.text == "+" ? Op::Union : Op::Diff, {l, push()}, t.pos);
    }
    return l;
  }

  Expr push() {
    auto l = postfix();
    if (is("#")) {
      auto pos = take().pos;
      return ex::make(Op::Push, {l, push()}, pos);
    }
    return l;
  }

  Expr postfix() {
    auto b = atom();
    while (is("[")) {
      auto pos = take().pos;
      auto k = expr();
      if (accept(":=")) {
        auto v = expr();
        expect("]");
        b = ex::make(Op::MapSet, {b, k, v}, pos);
      } else {
        expect("]");
        b = ex::make(Op::MapGet, {b, k}, pos);
      }
    }
    return b;
  }

  std::vector<Expr> list(const char* close) {
    std::vector<Expr> out;
    if (!is(close)) {
      out.push_back(expr());
      while (accept(",")) out.push_back(expr());
    }
    expect(close);
    return out;
  }

  Expr atom() {
    auto t = cur();
    switch (t.k) {
      case Tok::K::Number:
        take();
        return with_pos(ex::num(t.num), t.pos);
      case Tok::K::String: syntax(t.pos, "unexpected string in expression");
      case Tok::K::End: syntax(t.pos, "expected expression, found end of input");
      case Tok::K::Sym:
        if (accept("(")) {
          auto e = expr();
          expect(")");
          return e;
        }
        if (accept("{")) return ex::make(Op::SetLit, list("}"), t.pos);
        if (accept("[")) return ex::make(Op::StackLit, list("]"), t.pos);
        syntax(t.pos, "expected expression, found " + describe(t));
      case Tok::K::Ident: break;
    }
    take();
    if (t.text == "true") return with_pos(ex::tt(), t.pos);
    if (t.text == "false") return with_pos(ex::ff(), t.pos);
    if (t.text == "none") return with_pos(ex::none(), t.pos);
    if (t.text == "map" && is("{")) {
      take();
      std::vector<Expr> kv;
      if (!is("}")) {
        do {
          kv.push_back(expr());
          expect(":");
          kv.push_back(expr());
        } while (accept(","));
      }
      expect("}");
      return ex::make(Op::MapLit, std::move(kv), t.pos);
    }
    if (t.text == "at" && is("(")) {
      take();
      auto task = ident("task name");
      expect(",");
      auto label = ident("label");
      expect(")");
      return ex::unresolved_at(task, label, t.pos);
    }
    auto fn = functions().find(t.text);
    if (fn != functions().end() && is("(")) {
      take();
      auto args = list(")");
      if (args.size() != fn->second.arity)
        syntax(t.pos, t.text + " expects " + std::to_string(fn->second.arity) + " argument(s)");
      return ex::make(fn->second.op, std::move(args), t.pos);
    }
    return ex::unresolved_var(t.text, t.pos);
  }

  static Expr with_pos(Expr e, SrcPos pos) {
    auto n = std::make_shared<ExprNode>(*e);
    n->pos = pos;
    return n;
  }
};

}  // namespace

ModelFile parse_model_file(const std::string& text) { return Parser(text).file(); }

Expr parse_expr(const std::string& text) { return Parser(text).expr_only(); }

void ModelFile::set_config(const std::string& key, const std::string& value) {
  for (auto& e : config)
    if (e.key == key && !e.index) {
      e.value = value;
      return;
    }
  MConfigEntry e;
  e.key = key;
  e.value = value;
  config.push_back(std::move(e));
}

const MConfigEntry* ModelFile::find_config(const std::string& key) const {
  for (const auto& e : config)
    if (e.key == key && !e.index) return &e;
  return nullptr;
}

}  // namespace og
