#include "rankcond/sysdsl.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lexer.hpp"
#include "rankcond/errors.hpp"

namespace rankcond {

using detail::ExprParser;
using detail::Tok;
using detail::Token;

namespace {

struct Located {
  std::size_t line = 0;
  std::size_t column = 0;
};

class DocumentParser {
 public:
  explicit DocumentParser(std::string_view text) : toks_(detail::tokenize(text, true)), p_(toks_, 0) {}

  // Parses only annihilator statements against the declarations of `base`.
  DocumentParser(std::string_view text, const SystemDocument& base) : DocumentParser(text) {
    doc_ = base;
    doc_.annihilators.clear();
    annihilators_only_ = true;
  }

  SystemDocument parse() {
    while (p_.peek().kind != Tok::End) {
      if (p_.peek().kind == Tok::Newline) {
        p_.next();
        continue;
      }
      statement();
    }
    validate();
    return std::move(doc_);
  }

 private:
  const Token& ident(const char* what) { return p_.expect(Tok::Ident, what); }

  void end_of_statement() {
    if (p_.peek().kind != Tok::Newline && p_.peek().kind != Tok::End) p_.fail("expected end of line", p_.peek());
    if (p_.peek().kind == Tok::Newline) p_.next();
  }

  std::string new_name(const Token& t) {
    if (!names_.insert(t.text).second) p_.fail("duplicate name '" + t.text + "'", t);
    return t.text;
  }

  Expr expression() {
    const Token& at = p_.peek();
    Expr e = p_.parse_expression();
    exprs_.emplace_back(e, Located{at.line, at.column});
    return e;
  }

  std::vector<Expr> vector(const std::string& what) {
    const Token& open = p_.expect(Tok::LBracket, "'['");
    std::vector<Expr> v;
    if (p_.peek().kind != Tok::RBracket) {
      v.push_back(expression());
      while (p_.peek().kind == Tok::Comma) {
        p_.next();
        v.push_back(expression());
      }
    }
    p_.expect(Tok::RBracket, "']' or ','");
    vectors_.push_back({what, v.size(), Located{open.line, open.column}});
    return v;
  }

  AnalysisKind kind() {
    const Token& t = ident("analysis kind");
    if (t.text == "observability") return AnalysisKind::Observability;
    if (t.text == "controllability") return AnalysisKind::Controllability;
    p_.fail("expected 'observability' or 'controllability'", t);
  }

  void statement() {
    const Token& kw = ident("a keyword");
    const std::string& k = kw.text;
    if (annihilators_only_ && k != "annihilator") p_.fail("expected 'annihilator'", kw);
    if (k == "system") {
      doc_.name = ident("system name").text;
    } else if (k == "state") {
      if (p_.peek().kind != Tok::Ident) p_.fail("expected state names", p_.peek());
      while (p_.peek().kind == Tok::Ident) {
        const Token& t = p_.next();
        if (t.text == doc_.time) p_.fail("time symbol cannot be a state", t);
        doc_.states.push_back(new_name(t));
      }
    } else if (k == "time") {
      if (time_set_) p_.fail("duplicate time declaration", kw);
      const Token& t = ident("time symbol");
      if (std::find(doc_.states.begin(), doc_.states.end(), t.text) != doc_.states.end())
        p_.fail("time symbol cannot be a state", t);
      if (t.text != doc_.time) {
        names_.erase(doc_.time);
        doc_.time = new_name(t);
      }
      time_set_ = true;
    } else if (k == "param") {
      Parameter prm;
      prm.name = new_name(ident("parameter name"));
      if (p_.peek().kind == Tok::Equals) {
        p_.next();
        const Token& at = p_.peek();
        const Expr v = simplify(p_.parse_expression());
        if (!v.is_constant()) p_.fail("parameter value must be a rational number", at);
        prm.value = v.scalar();
      }
      doc_.params.push_back(std::move(prm));
    } else if (k == "drift") {
      if (doc_.drift) p_.fail("duplicate drift", kw);
      p_.expect(Tok::Equals, "'='");
      doc_.drift = vector("drift");
    } else if (k == "input") {
      NamedVector v;
      v.name = new_name(ident("input name"));
      p_.expect(Tok::Equals, "'='");
      v.components = vector("input " + v.name);
      doc_.inputs.push_back(std::move(v));
    } else if (k == "output") {
      NamedExpr o;
      o.name = new_name(ident("output name"));
      p_.expect(Tok::Equals, "'='");
      o.value = expression();
      doc_.outputs.push_back(std::move(o));
    } else if (k == "avoid") {
      doc_.avoid.push_back(expression());
    } else if (k == "expect") {
      ExpectedTrace e;
      e.kind = kind();
      const Token& d = ident("'dims'");
      if (d.text != "dims") p_.fail("expected 'dims'", d);
      p_.expect(Tok::Equals, "'='");
      p_.expect(Tok::LBracket, "'['");
      while (p_.peek().kind == Tok::Integer) {
        e.dims.push_back(std::stoul(p_.next().text));
        if (p_.peek().kind == Tok::Comma) p_.next();
      }
      p_.expect(Tok::RBracket, "']'");
      for (const auto& x : doc_.expects)
        if (x.kind == e.kind) p_.fail("duplicate expect block", kw);
      doc_.expects.push_back(std::move(e));
    } else if (k == "annihilator") {
      AnnihilatorDecl a;
      a.kind = kind();
      const Token& nm = ident("annihilator name");
      for (const auto& x : doc_.annihilators)
        if (x.name == nm.text) p_.fail("duplicate annihilator '" + nm.text + "'", nm);
      a.name = nm.text;
      if (p_.peek().kind == Tok::Ident) {
        const Token& ex = p_.next();
        if (ex.text != "holds" && ex.text != "structural" && ex.text != "fails")
          p_.fail("expected 'holds', 'structural' or 'fails'", ex);
        a.expectation = ex.text;
      }
      p_.expect(Tok::Equals, "'='");
      a.components = vector("annihilator " + a.name);
      doc_.annihilators.push_back(std::move(a));
    } else {
      p_.fail("unknown keyword '" + k + "'", kw);
    }
    end_of_statement();
  }

  void validate() {
    if (doc_.states.empty()) throw ParseError("no state variables declared", 1, 1);
    const std::size_t n = doc_.states.size();
    for (const auto& v : vectors_) {
      if (v.size != n)
        throw ParseError(v.what + " has " + std::to_string(v.size) + " components, expected " + std::to_string(n),
                         v.at.line, v.at.column);
    }
    std::set<std::string, std::less<>> known(doc_.states.begin(), doc_.states.end());
    known.insert(doc_.time);
    for (const auto& p : doc_.params) known.insert(p.name);
    for (const auto& [e, at] : exprs_)
      for (const auto& s : free_symbols(e))
        if (!known.count(s)) throw ParseError("unknown symbol '" + s + "'", at.line, at.column);
    for (const auto& e : doc_.expects) {
      if (e.dims.empty()) throw ParseError("empty expected trace", 1, 1);
      for (std::size_t i = 1; i < e.dims.size(); ++i)
        if (e.dims[i] <= e.dims[i - 1]) throw ParseError("expected dims must strictly increase", 1, 1);
      if (e.dims.back() > n) throw ParseError("expected dims exceed the state dimension", 1, 1);
    }
  }

  struct VectorSite {
    std::string what;
    std::size_t size;
    Located at;
  };

  std::vector<Token> toks_;
  ExprParser p_;
  SystemDocument doc_;
  bool time_set_ = false;
  bool annihilators_only_ = false;
  std::set<std::string, std::less<>> names_{"t"};
  std::vector<std::pair<Expr, Located>> exprs_;
  std::vector<VectorSite> vectors_;
};

std::string join(const std::vector<Expr>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
  return s + "]";
}

std::map<std::string, Expr, std::less<>> bindings(const SystemDocument& doc,
                                                   const std::map<std::string, Rational>& overrides) {
  std::map<std::string, Expr, std::less<>> sub;
  for (const auto& [name, value] : overrides) {
    const bool declared =
        std::any_of(doc.params.begin(), doc.params.end(), [&](const Parameter& p) { return p.name == name; });
    if (!declared) throw InvalidArgument("override of undeclared parameter '" + name + "'");
    sub[name] = Expr(value);
  }
  for (const auto& p : doc.params)
    if (p.value && !sub.count(p.name)) sub[p.name] = Expr(*p.value);
  return sub;
}

}  // namespace

std::optional<std::vector<std::size_t>> SystemDocument::expected_dims(AnalysisKind kind) const {
  for (const auto& e : expects)
    if (e.kind == kind) return e.dims;
  return std::nullopt;
}

bool operator==(const SystemDocument& a, const SystemDocument& b) {
  auto same_params = [&] {
    if (a.params.size() != b.params.size()) return false;
    for (std::size_t i = 0; i < a.params.size(); ++i)
      if (a.params[i].name != b.params[i].name || a.params[i].value != b.params[i].value) return false;
    return true;
  };
  auto same_named_vectors = [](const std::vector<NamedVector>& x, const std::vector<NamedVector>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].name != y[i].name || x[i].components != y[i].components) return false;
    return true;
  };
  auto same_outputs = [&] {
    if (a.outputs.size() != b.outputs.size()) return false;
    for (std::size_t i = 0; i < a.outputs.size(); ++i)
      if (a.outputs[i].name != b.outputs[i].name || a.outputs[i].value != b.outputs[i].value) return false;
    return true;
  };
  auto same_expects = [&] {
    if (a.expects.size() != b.expects.size()) return false;
    for (std::size_t i = 0; i < a.expects.size(); ++i)
      if (a.expects[i].kind != b.expects[i].kind || a.expects[i].dims != b.expects[i].dims) return false;
    return true;
  };
  auto same_annihilators = [&] {
    if (a.annihilators.size() != b.annihilators.size()) return false;
    for (std::size_t i = 0; i < a.annihilators.size(); ++i) {
      const auto& x = a.annihilators[i];
      const auto& y = b.annihilators[i];
      if (x.name != y.name || x.kind != y.kind || x.expectation != y.expectation || x.components != y.components)
        return false;
    }
    return true;
  };
  return a.name == b.name && a.states == b.states && a.time == b.time && same_params() && a.drift == b.drift &&
         same_named_vectors(a.inputs, b.inputs) && same_outputs() && a.avoid == b.avoid && same_expects() &&
         same_annihilators();
}

std::vector<AnnihilatorDecl> parse_annihilators(std::string_view text, const SystemDocument& base) {
  return DocumentParser(text, base).parse().annihilators;
}

SystemDocument parse_system(std::string_view text) { return DocumentParser(text).parse(); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SystemDocument load_system_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_system(text);
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), e.column(), path);
  }
}

std::string serialize(const SystemDocument& doc) {
  std::ostringstream out;
  out << "system " << doc.name << "\n";
  out << "state";
  for (const auto& s : doc.states) out << " " << s;
  out << "\n";
  out << "time " << doc.time << "\n";
  for (const auto& p : doc.params) {
    out << "param " << p.name;
    if (p.value) out << " = " << p.value->get_str();
    out << "\n";
  }
  if (doc.drift) out << "drift = " << join(*doc.drift) << "\n";
  for (const auto& i : doc.inputs) out << "input " << i.name << " = " << join(i.components) << "\n";
  for (const auto& o : doc.outputs) out << "output " << o.name << " = " << to_string(o.value) << "\n";
  for (const auto& a : doc.avoid) out << "avoid " << to_string(a) << "\n";
  for (const auto& e : doc.expects) {
    out << "expect " << to_string(e.kind) << " dims = [";
    for (std::size_t i = 0; i < e.dims.size(); ++i) out << (i ? ", " : "") << e.dims[i];
    out << "]\n";
  }
  for (const auto& a : doc.annihilators)
    out << "annihilator " << to_string(a.kind) << " " << a.name << " " << a.expectation << " = "
        << join(a.components) << "\n";
  return out.str();
}

SystemSpec lower(const SystemDocument& doc, const std::map<std::string, Rational>& overrides) {
  const auto sub = bindings(doc, overrides);
  std::vector<Parameter> params = doc.params;
  for (auto& p : params)
    if (auto it = overrides.find(p.name); it != overrides.end()) p.value = it->second;
  SystemSpec sys;
  sys.name = doc.name;
  sys.table = SymbolTable(doc.states, doc.time, params);
  auto lower_vec = [&](const std::vector<Expr>& v) {
    VectorField f;
    for (const Expr& e : v) f.components.push_back(substitute(e, sub));
    return f;
  };
  sys.drift = doc.drift ? lower_vec(*doc.drift) : zero_field(doc.states.size());
  for (const auto& i : doc.inputs) {
    sys.input_names.push_back(i.name);
    sys.inputs.push_back(lower_vec(i.components));
  }
  for (const auto& o : doc.outputs) {
    sys.output_names.push_back(o.name);
    sys.outputs.push_back(ScalarField{substitute(o.value, sub)});
  }
  for (const auto& a : doc.avoid) sys.avoid.push_back(substitute(a, sub));
  sys.validate();
  return sys;
}

std::vector<AnnihilatorFixture> lower_annihilators(const SystemDocument& doc,
                                                   const std::map<std::string, Rational>& overrides) {
  const auto sub = bindings(doc, overrides);
  std::vector<AnnihilatorFixture> out;
  for (const auto& a : doc.annihilators) {
    AnnihilatorFixture f;
    f.name = a.name;
    f.kind = a.kind;
    f.expectation = a.expectation;
    for (const Expr& e : a.components) f.components.push_back(substitute(e, sub));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace rankcond
