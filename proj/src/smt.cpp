#include "lazyref/smt.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

namespace lazyref::smt {

using logic::ArithOp;
using logic::Assignment;
using logic::CmpOp;
using logic::ConnOp;
using logic::Pred;
using logic::Sort;
using logic::Value;

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

// ---- SMT-LIB rendering --------------------------------------------------------

namespace {
void sexpr(std::ostream& os, const Pred& p) {
  using namespace logic;
  std::visit(
      overloaded{
          [&](const PVar& v) { os << v.name; },
          [&](const PInt& v) {
            if (v.v < 0)
              os << "(- " << ~static_cast<std::uint64_t>(v.v) + 1 << ")";
            else
              os << v.v;
          },
          [&](const PBool& v) { os << (v.v ? "true" : "false"); },
          [&](const PCmp& c) {
            const char* op = nullptr;
            switch (c.op) {
              case CmpOp::Lt: op = "<"; break;
              case CmpOp::Le: op = "<="; break;
              case CmpOp::Gt: op = ">"; break;
              case CmpOp::Ge: op = ">="; break;
              case CmpOp::Eq: op = "="; break;
              case CmpOp::Ne: op = nullptr; break;
            }
            if (!op) {
              os << "(not (= ";
              sexpr(os, c.l);
              os << ' ';
              sexpr(os, c.r);
              os << "))";
              return;
            }
            os << '(' << op << ' ';
            sexpr(os, c.l);
            os << ' ';
            sexpr(os, c.r);
            os << ')';
          },
          [&](const PArith& a) {
            os << (a.op == ArithOp::Add ? "(+ " : "(- ");
            sexpr(os, a.l);
            os << ' ';
            sexpr(os, a.r);
            os << ')';
          },
          [&](const PMulC& m) {
            os << "(* ";
            if (m.coeff < 0)
              os << "(- " << -m.coeff << ")";
            else
              os << m.coeff;
            os << ' ';
            sexpr(os, m.operand);
            os << ')';
          },
          [&](const PNot& n) {
            os << "(not ";
            sexpr(os, n.p);
            os << ')';
          },
          [&](const PConn& c) {
            const char* op = "and";
            switch (c.op) {
              case ConnOp::And: op = "and"; break;
              case ConnOp::Or: op = "or"; break;
              case ConnOp::Imp: op = "=>"; break;
              case ConnOp::Iff: op = "="; break;
            }
            os << '(' << op << ' ';
            sexpr(os, c.l);
            os << ' ';
            sexpr(os, c.r);
            os << ')';
          }},
      p->node);
}
}  // namespace

namespace {
bool is_true_pred(const Pred& p) {
  const auto* b = std::get_if<logic::PBool>(&p->node);
  return b && b->v;
}
}  // namespace

std::string emit_smtlib(const Query& q) {
  std::ostringstream os;
  os << "(set-logic QF_LIA)\n";
  for (const auto& [name, sort] : q.decls)
    os << "(declare-const " << name << (sort == Sort::Int ? " Int" : " Bool")
       << ")\n";
  for (const auto& h : q.hyps) {
    if (is_true_pred(h)) continue;
    os << "(assert ";
    sexpr(os, h);
    os << ")\n";
  }
  if (!is_true_pred(q.lhs)) {
    os << "(assert ";
    sexpr(os, q.lhs);
    os << ")\n";
  }
  os << "(assert (not ";
  sexpr(os, q.goal);
  os << "))\n(check-sat)\n(get-model)\n";
  return os.str();
}

// ---- model checking -------------------------------------------------------------

bool model_refutes(const Query& q, const Assignment& model) {
  auto holds = [&](const Pred& p) {
    auto v = logic::eval_pred(p, model);
    if (!v) return false;
    const auto* b = std::get_if<bool>(&*v);
    return b && *b;
  };
  for (const auto& h : q.hyps)
    if (!holds(h)) return false;
  if (!holds(q.lhs)) return false;
  auto g = logic::eval_pred(q.goal, model);
  if (!g) return false;
  const auto* b = std::get_if<bool>(&*g);
  return b && !*b;
}

// ---- builtin decision procedure --------------------------------------------------

namespace {

struct CapExceeded {
  std::string what;
};

using Wide = __int128;

Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

constexpr Wide kMagLimit = static_cast<Wide>(1) << 100;

void check_mag(Wide v) {
  if (wide_abs(v) > kMagLimit) throw CapExceeded{"coefficient overflow"};
}

Wide wide_gcd(Wide a, Wide b) {
  a = wide_abs(a);
  b = wide_abs(b);
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// floor(a / b) for b > 0
Wide floor_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
Wide ceil_div(Wide a, Wide b) { return -floor_div(-a, b); }

// Linear term  sum coeffs[x]*x + k, interpreted as `<= 0` when used as a
// constraint.
struct LinTerm {
  std::map<std::string, Wide> coeffs;
  Wide k = 0;

  void add_scaled(const LinTerm& other, Wide scale) {
    for (const auto& [name, c] : other.coeffs) {
      Wide& slot = coeffs[name];
      slot += c * scale;
      check_mag(slot);
      if (slot == 0) coeffs.erase(name);
    }
    k += other.k * scale;
    check_mag(k);
  }
};

// Integer tightening: divide by the gcd of the variable coefficients and
// floor the constant, so e.g. 2x <= 1 becomes x <= 0.
void tighten(LinTerm& t) {
  if (t.coeffs.empty()) return;
  Wide g = 0;
  for (const auto& [_, c] : t.coeffs) g = wide_gcd(g, c);
  if (g <= 1) return;
  for (auto& [_, c] : t.coeffs) c /= g;
  // sum c*x + k <= 0  <=>  sum (c/g)*x <= floor(-k / g)
  t.k = -floor_div(-t.k, g);
}

struct LinOrThrow {
  const logic::SortMap& decls;

  LinTerm term(const Pred& p) const {
    using namespace logic;
    LinTerm out;
    std::visit(overloaded{[&](const PVar& v) { out.coeffs[v.name] = 1; },
                          [&](const PInt& v) { out.k = v.v; },
                          [&](const PBool&) {
                            throw CapExceeded{"boolean in arithmetic term"};
                          },
                          [&](const PArith& a) {
                            out = term(a.l);
                            out.add_scaled(term(a.r),
                                           a.op == ArithOp::Add ? 1 : -1);
                          },
                          [&](const PMulC& m) {
                            LinTerm inner = term(m.operand);
                            LinTerm zero;
                            zero.add_scaled(inner, m.coeff);
                            out = zero;
                          },
                          [&](const auto&) {
                            throw CapExceeded{"non-arithmetic term"};
                          }},
               p->node);
    return out;
  }
};

// NNF with comparison leaves pre-normalized to `term <= 0` constraints.
struct Form {
  enum class Kind { And, Or, BoolLit, Const, Lin };
  Kind kind = Kind::Const;
  std::vector<Form> children;  // And / Or
  std::string bvar;            // BoolLit
  bool positive = true;        // BoolLit
  bool cval = true;            // Const
  LinTerm lin;                 // Lin

  static Form conj(std::vector<Form> cs) {
    Form f;
    f.kind = Kind::And;
    f.children = std::move(cs);
    return f;
  }
  static Form disj(std::vector<Form> cs) {
    Form f;
    f.kind = Kind::Or;
    f.children = std::move(cs);
    return f;
  }
  static Form blit(std::string name, bool pos) {
    Form f;
    f.kind = Kind::BoolLit;
    f.bvar = std::move(name);
    f.positive = pos;
    return f;
  }
  static Form constant(bool v) {
    Form f;
    f.kind = Kind::Const;
    f.cval = v;
    return f;
  }
  static Form lin_le0(LinTerm t) {
    Form f;
    f.kind = Kind::Lin;
    tighten(t);
    f.lin = std::move(t);
    return f;
  }
};

class Nnf {
 public:
  explicit Nnf(const logic::SortMap& decls) : decls_(decls), lin_{decls} {}

  Form run(const Pred& p, bool positive) {
    using namespace logic;
    return std::visit(
        overloaded{
            [&](const PVar& v) -> Form {
              auto it = decls_.find(v.name);
              if (it == decls_.end() || it->second != Sort::Bool)
                throw CapExceeded{"ill-sorted boolean variable " + v.name};
              return Form::blit(v.name, positive);
            },
            [&](const PInt&) -> Form {
              throw CapExceeded{"integer used as a formula"};
            },
            [&](const PBool& v) -> Form { return Form::constant(v.v == positive); },
            [&](const PNot& n) -> Form { return run(n.p, !positive); },
            [&](const PConn& c) -> Form {
              switch (c.op) {
                case ConnOp::And:
                  return positive
                             ? Form::conj({run(c.l, true), run(c.r, true)})
                             : Form::disj({run(c.l, false), run(c.r, false)});
                case ConnOp::Or:
                  return positive
                             ? Form::disj({run(c.l, true), run(c.r, true)})
                             : Form::conj({run(c.l, false), run(c.r, false)});
                case ConnOp::Imp:
                  return positive
                             ? Form::disj({run(c.l, false), run(c.r, true)})
                             : Form::conj({run(c.l, true), run(c.r, false)});
                case ConnOp::Iff:
                  return iff(c.l, c.r, positive);
              }
              throw CapExceeded{"unreachable"};
            },
            [&](const PCmp& c) -> Form {
              if (c.op == CmpOp::Eq || c.op == CmpOp::Ne) {
                bool want_eq = (c.op == CmpOp::Eq) == positive;
                if (operand_sort(c.l) == Sort::Bool)
                  return iff(c.l, c.r, want_eq);
                return int_eq(c.l, c.r, want_eq);
              }
              CmpOp op = positive ? c.op : flip(c.op);
              LinTerm l = lin_.term(c.l);
              LinTerm diff;
              switch (op) {
                case CmpOp::Lt:  // l - r + 1 <= 0
                  diff = l;
                  diff.add_scaled(lin_.term(c.r), -1);
                  diff.k += 1;
                  break;
                case CmpOp::Le:
                  diff = l;
                  diff.add_scaled(lin_.term(c.r), -1);
                  break;
                case CmpOp::Gt:  // r - l + 1 <= 0
                  diff = lin_.term(c.r);
                  diff.add_scaled(l, -1);
                  diff.k += 1;
                  break;
                case CmpOp::Ge:
                  diff = lin_.term(c.r);
                  diff.add_scaled(l, -1);
                  break;
                default:
                  throw CapExceeded{"unreachable"};
              }
              return Form::lin_le0(std::move(diff));
            },
            [&](const auto&) -> Form {
              throw CapExceeded{"arithmetic used as a formula"};
            }},
        p->node);
  }

 private:
  static CmpOp flip(CmpOp op) {
    switch (op) {
      case CmpOp::Lt: return CmpOp::Ge;
      case CmpOp::Le: return CmpOp::Gt;
      case CmpOp::Gt: return CmpOp::Le;
      case CmpOp::Ge: return CmpOp::Lt;
      default: return op;
    }
  }

  Sort operand_sort(const Pred& p) const {
    auto r = logic::sort_check(decls_, p);
    if (const auto* s = std::get_if<Sort>(&r)) return *s;
    throw CapExceeded{"ill-sorted query operand"};
  }

  Form iff(const Pred& l, const Pred& r, bool same) {
    if (same)
      return Form::disj({Form::conj({run(l, true), run(r, true)}),
                         Form::conj({run(l, false), run(r, false)})});
    return Form::disj({Form::conj({run(l, true), run(r, false)}),
                       Form::conj({run(l, false), run(r, true)})});
  }

  Form int_eq(const Pred& l, const Pred& r, bool eq) {
    LinTerm a = lin_.term(l);
    LinTerm b = lin_.term(r);
    LinTerm lr = a;   // l - r <= 0
    lr.add_scaled(b, -1);
    LinTerm rl = b;   // r - l <= 0
    rl.add_scaled(a, -1);
    if (eq) return Form::conj({Form::lin_le0(lr), Form::lin_le0(rl)});
    LinTerm lt = lr;  // l < r
    lt.k += 1;
    LinTerm gt = rl;  // r < l
    gt.k += 1;
    return Form::disj({Form::lin_le0(lt), Form::lin_le0(gt)});
  }

  const logic::SortMap& decls_;
  LinOrThrow lin_;
};

struct Cube {
  std::map<std::string, bool> bools;
  std::vector<LinTerm> lins;
};

enum class CubeVerdict { Unsat, Sat, Unknown };

// Fourier-Motzkin elimination over one cube with integer back-substitution.
class CubeSolver {
 public:
  CubeSolver(const BuiltinLimits& limits) : limits_(limits) {}

  CubeVerdict solve(const Cube& cube, Assignment& model_out) {
    std::vector<LinTerm> cs;
    for (const LinTerm& t : cube.lins) {
      LinTerm c = t;
      tighten(c);
      if (c.coeffs.empty()) {
        if (c.k > 0) return CubeVerdict::Unsat;
        continue;
      }
      cs.push_back(std::move(c));
    }

    std::set<std::string> vars;
    for (const auto& c : cs)
      for (const auto& [name, _] : c.coeffs) vars.insert(name);

    std::vector<Eliminated> trail;

    while (!vars.empty()) {
      // Cheapest variable first: fewest lower*upper products.
      std::string best;
      std::size_t best_cost = SIZE_MAX;
      for (const auto& v : vars) {
        std::size_t lo = 0, hi = 0;
        for (const auto& c : cs) {
          auto it = c.coeffs.find(v);
          if (it == c.coeffs.end()) continue;
          (it->second < 0 ? lo : hi)++;
        }
        std::size_t cost = lo * hi;
        if (cost < best_cost) {
          best_cost = cost;
          best = v;
        }
      }
      vars.erase(best);

      Eliminated el;
      el.var = best;
      std::vector<LinTerm> rest;
      for (auto& c : cs) {
        auto it = c.coeffs.find(best);
        if (it == c.coeffs.end())
          rest.push_back(std::move(c));
        else if (it->second < 0)
          el.lowers.push_back(std::move(c));
        else
          el.uppers.push_back(std::move(c));
      }
      for (const auto& lo : el.lowers) {
        Wide a = -lo.coeffs.at(best);
        for (const auto& up : el.uppers) {
          Wide b = up.coeffs.at(best);
          // From a*x >= lo_rest and b*x <= -up_rest: b*lo_rest + a*up_rest <= 0.
          LinTerm combined;
          combined.add_scaled(lo, b);
          combined.add_scaled(up, a);
          combined.coeffs.erase(best);
          tighten(combined);
          if (combined.coeffs.empty()) {
            if (combined.k > 0) return CubeVerdict::Unsat;
            continue;
          }
          rest.push_back(std::move(combined));
          if (rest.size() > limits_.max_constraints)
            throw CapExceeded{"constraint blowup during elimination"};
        }
      }
      cs = std::move(rest);
      trail.push_back(std::move(el));
    }

    for (const auto& c : cs)
      if (c.coeffs.empty() && c.k > 0) return CubeVerdict::Unsat;

    // Rationally satisfiable; search for an integer point right to left.
    // Greedy choices can strand a later variable in an empty interval
    // (e.g. 2x + 3y = 1 with y picked as 0), so each variable backtracks
    // over a few candidates near its bounds under a global node budget.
    Assignment model;
    for (const auto& [name, v] : cube.bools) model[name] = Value{v};
    std::size_t budget = 5000;
    if (assign_from(trail, trail.size(), model, budget)) {
      model_out = std::move(model);
      return CubeVerdict::Sat;
    }
    return CubeVerdict::Unknown;
  }

 private:
  struct Eliminated {
    std::string var;
    std::vector<LinTerm> lowers;  // -a*x + rest <= 0, a > 0
    std::vector<LinTerm> uppers;  // b*x + rest <= 0, b > 0
  };

  bool assign_from(const std::vector<Eliminated>& trail, std::size_t next,
                   Assignment& model, std::size_t& budget) {
    if (next == 0) return true;
    const Eliminated& el = trail[next - 1];
    auto eval_rest = [&](const LinTerm& t) -> Wide {
      Wide acc = t.k;
      for (const auto& [name, c] : t.coeffs) {
        if (name == el.var) continue;
        auto mv = model.find(name);
        Wide val = mv == model.end() ? 0 : std::get<std::int64_t>(mv->second);
        acc += c * val;
        check_mag(acc);
      }
      return acc;
    };
    bool has_lo = false, has_hi = false;
    Wide lo = 0, hi = 0;
    for (const auto& l : el.lowers) {
      Wide a = -l.coeffs.at(el.var);
      Wide bound = ceil_div(eval_rest(l), a);  // x >= rest/a
      if (!has_lo || bound > lo) lo = bound;
      has_lo = true;
    }
    for (const auto& u : el.uppers) {
      Wide b = u.coeffs.at(el.var);
      Wide bound = floor_div(-eval_rest(u), b);  // x <= -rest/b
      if (!has_hi || bound < hi) hi = bound;
      has_hi = true;
    }
    if (has_lo && has_hi && lo > hi) return false;

    std::vector<Wide> candidates;
    auto push = [&](Wide v) {
      if (has_lo && v < lo) return;
      if (has_hi && v > hi) return;
      for (Wide c : candidates)
        if (c == v) return;
      candidates.push_back(v);
    };
    Wide preferred = 0;
    if (has_lo && preferred < lo) preferred = lo;
    if (has_hi && preferred > hi) preferred = hi;
    push(preferred);
    for (Wide d = 1; d <= 3; ++d) {
      push(preferred + d);
      push(preferred - d);
    }
    if (has_lo) {
      push(lo);
      push(lo + 1);
    }
    if (has_hi) {
      push(hi);
      push(hi - 1);
    }
    for (Wide v : candidates) {
      if (budget == 0) return false;
      --budget;
      model[el.var] = Value{static_cast<std::int64_t>(v)};
      if (assign_from(trail, next - 1, model, budget)) return true;
    }
    model.erase(el.var);
    return false;
  }

  const BuiltinLimits& limits_;
};

class CubeEnumerator {
 public:
  CubeEnumerator(const BuiltinLimits& limits, const Query& q)
      : limits_(limits), query_(q), solver_(limits) {}

  Verdict run(const Form& root) {
    Cube cube;
    explore({&root}, cube);
    if (sat_) {
      // Fill unconstrained declarations so the model is total.
      for (const auto& [name, sort] : query_.decls)
        if (!sat_model_.count(name))
          sat_model_[name] =
              sort == Sort::Int ? Value{std::int64_t{0}} : Value{false};
      if (!model_refutes(query_, sat_model_))
        return Verdict{Verdict::Kind::Unknown, {},
                       "countermodel failed verification"};
      return Verdict{Verdict::Kind::Invalid, sat_model_, {}};
    }
    if (unknown_) return Verdict{Verdict::Kind::Unknown, {}, unknown_reason_};
    return Verdict{Verdict::Kind::Valid, {}, {}};
  }

 private:
  void explore(std::vector<const Form*> work, Cube& cube) {
    if (sat_) return;
    if (work.empty()) {
      if (++cubes_ > limits_.max_cubes) throw CapExceeded{"cube cap exceeded"};
      Assignment model;
      switch (solver_.solve(cube, model)) {
        case CubeVerdict::Sat:
          sat_ = true;
          sat_model_ = std::move(model);
          break;
        case CubeVerdict::Unknown:
          unknown_ = true;
          unknown_reason_ = "integer gap after elimination";
          break;
        case CubeVerdict::Unsat:
          break;
      }
      return;
    }
    const Form* f = work.back();
    work.pop_back();
    switch (f->kind) {
      case Form::Kind::Const:
        if (f->cval) explore(std::move(work), cube);
        return;
      case Form::Kind::And: {
        for (const auto& c : f->children) work.push_back(&c);
        explore(std::move(work), cube);
        return;
      }
      case Form::Kind::Or: {
        for (const auto& c : f->children) {
          if (sat_) return;
          std::vector<const Form*> branch = work;
          branch.push_back(&c);
          explore(std::move(branch), cube);
        }
        return;
      }
      case Form::Kind::BoolLit: {
        auto it = cube.bools.find(f->bvar);
        if (it != cube.bools.end()) {
          if (it->second != f->positive) return;  // conflicting literal
          explore(std::move(work), cube);
          return;
        }
        cube.bools[f->bvar] = f->positive;
        explore(std::move(work), cube);
        cube.bools.erase(f->bvar);
        return;
      }
      case Form::Kind::Lin: {
        cube.lins.push_back(f->lin);
        explore(std::move(work), cube);
        cube.lins.pop_back();
        return;
      }
    }
  }

  const BuiltinLimits& limits_;
  const Query& query_;
  CubeSolver solver_;
  std::size_t cubes_ = 0;
  bool sat_ = false;
  bool unknown_ = false;
  std::string unknown_reason_;
  Assignment sat_model_;
};

}  // namespace

Verdict builtin_check(const Query& q, const BuiltinLimits& limits) {
  try {
    Nnf nnf(q.decls);
    std::vector<Form> parts;
    for (const auto& h : q.hyps) parts.push_back(nnf.run(h, true));
    parts.push_back(nnf.run(q.lhs, true));
    parts.push_back(nnf.run(q.goal, false));
    Form root = Form::conj(std::move(parts));
    CubeEnumerator enumerator(limits, q);
    return enumerator.run(root);
  } catch (const CapExceeded& cap) {
    return Verdict{Verdict::Kind::Unknown, {}, cap.what};
  }
}

// ---- external backend -----------------------------------------------------------

namespace {

std::optional<std::string> run_process(const std::string& command,
                                       const std::string& input, int limit_s) {
  char path[] = "/tmp/lazyref_query_XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0) return std::nullopt;
  {
    std::ofstream out(path);
    out << input;
  }
  close(fd);
  std::string full = "timeout " + std::to_string(limit_s) + "s sh -c '" +
                     command + "' < " + path + " 2>/dev/null";
  std::string output;
  if (FILE* pipe = popen(full.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
    pclose(pipe);
  } else {
    std::remove(path);
    return std::nullopt;
  }
  std::remove(path);
  return output;
}

// Pulls (define-fun NAME () SORT VAL) bindings out of a get-model dump.
Assignment parse_model(const std::string& text, const logic::SortMap& decls) {
  Assignment model;
  std::size_t pos = 0;
  while ((pos = text.find("define-fun", pos)) != std::string::npos) {
    pos += 10;
    std::istringstream in(text.substr(pos, 256));
    std::string name, unit, sort, val;
    in >> name >> unit >> sort >> val;
    if (!decls.count(name)) continue;
    if (sort == "Int") {
      std::int64_t sign = 1;
      if (val == "(-") {
        in >> val;
        sign = -1;
        if (!val.empty() && val.back() == ')') val.pop_back();
      }
      try {
        model[name] = Value{sign * std::stoll(val)};
      } catch (const std::exception&) {
      }
    } else if (sort == "Bool") {
      model[name] = Value{val.rfind("true", 0) == 0};
    }
  }
  return model;
}

}  // namespace

Verdict check_valid(const Query& q, const Backend& b) {
  if (b.kind == Backend::Kind::Builtin) return builtin_check(q);

  auto output = run_process(b.command, emit_smtlib(q), b.time_limit_s);
  if (!output)
    return Verdict{Verdict::Kind::Unknown, {}, "solver process failed to start"};
  std::istringstream in(*output);
  std::string first;
  while (std::getline(in, first) && first.empty()) {
  }
  if (first.rfind("unsat", 0) == 0) return Verdict{Verdict::Kind::Valid, {}, {}};
  if (first.rfind("sat", 0) == 0) {
    Assignment model = parse_model(*output, q.decls);
    for (const auto& [name, sort] : q.decls)
      if (!model.count(name))
        model[name] = sort == Sort::Int ? Value{std::int64_t{0}} : Value{false};
    if (model_refutes(q, model)) return Verdict{Verdict::Kind::Invalid, model, {}};
    return Verdict{Verdict::Kind::Unknown, {},
                   "external countermodel failed verification"};
  }
  if (first.rfind("unknown", 0) == 0)
    return Verdict{Verdict::Kind::Unknown, {}, "solver returned unknown"};
  return Verdict{Verdict::Kind::Unknown, {},
                 "unrecognized solver output: " + first};
}

}  // namespace lazyref::smt
