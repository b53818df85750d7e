#include "lazyref/subst.hpp"

namespace lazyref {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string name = base;
  while (avoid.count(name)) name += '\'';
  return name;
}

namespace {

// Renames binder `old` to something avoiding both the substitution payload
// and the body's own free variables, returning the new name.
std::string avoid_capture(const std::string& old, const std::set<std::string>& in_a,
                          const ExprPtr& body, std::string* out) {
  std::set<std::string> avoid = in_a;
  collect_free_vars(body, avoid);
  *out = fresh_name(old, avoid);
  return *out;
}

ExprPtr subst_e(const ExprPtr& e, const std::string& x, const ExprPtr& a,
                const std::set<std::string>& fva);
RTypePtr subst_t(const RTypePtr& t, const std::string& x, const ExprPtr& a,
                 const std::set<std::string>& fva);

RTypePtr subst_t(const RTypePtr& t, const std::string& x, const ExprPtr& a,
                 const std::set<std::string>& fva) {
  if (!t) return t;
  return std::visit(
      overloaded{
          [&](const RBase& b) -> RTypePtr {
            if (b.value_binder == x) return t;
            std::string binder = b.value_binder;
            ExprPtr refinement = b.refinement;
            if (fva.count(binder)) {
              std::string renamed;
              avoid_capture(binder, fva, refinement, &renamed);
              refinement = subst_e(refinement, binder, mk_var(renamed), {renamed});
              binder = renamed;
            }
            return rt_base(binder, b.base, b.label, subst_e(refinement, x, a, fva));
          },
          [&](const RFun& f) -> RTypePtr {
            RTypePtr input = subst_t(f.input, x, a, fva);
            if (f.binder == x) return rt_fun(f.binder, input, f.output);
            std::string binder = f.binder;
            RTypePtr output = f.output;
            if (fva.count(binder)) {
              std::set<std::string> avoid = fva;
              collect_free_vars(output, avoid);
              binder = fresh_name(binder, avoid);
              output = subst_t(output, f.binder, mk_var(binder), {binder});
            }
            return rt_fun(binder, input, subst_t(output, x, a, fva));
          }},
      t->node);
}

ExprPtr subst_e(const ExprPtr& e, const std::string& x, const ExprPtr& a,
                const std::set<std::string>& fva) {
  if (!e) return e;
  return std::visit(
      overloaded{
          [&](const VarE& v) -> ExprPtr { return v.name == x ? a : e; },
          [&](const ConE&) -> ExprPtr { return e; },
          [&](const LamE& l) -> ExprPtr {
            RTypePtr ann = l.ann ? subst_t(l.ann, x, a, fva) : nullptr;
            if (l.binder == x) return mk_lam(l.binder, ann, l.body, e->span);
            std::string binder = l.binder;
            ExprPtr body = l.body;
            if (fva.count(binder)) {
              std::string renamed;
              avoid_capture(binder, fva, body, &renamed);
              body = subst_e(body, binder, mk_var(renamed), {renamed});
              binder = renamed;
            }
            return mk_lam(binder, ann, subst_e(body, x, a, fva), e->span);
          },
          [&](const AppE& ap) -> ExprPtr {
            return mk_app(subst_e(ap.fn, x, a, fva), subst_e(ap.arg, x, a, fva),
                          e->span);
          },
          [&](const LetE& l) -> ExprPtr {
            ExprPtr bound = subst_e(l.bound, x, a, fva);
            if (l.binder == x) return mk_let(l.binder, bound, l.body, e->span);
            std::string binder = l.binder;
            ExprPtr body = l.body;
            if (fva.count(binder)) {
              std::string renamed;
              avoid_capture(binder, fva, body, &renamed);
              body = subst_e(body, binder, mk_var(renamed), {renamed});
              binder = renamed;
            }
            return mk_let(binder, bound, subst_e(body, x, a, fva), e->span);
          },
          [&](const FixE& f) -> ExprPtr {
            RTypePtr param_type = subst_t(f.param_type, x, a, fva);
            if (f.binder == x)
              return mk_fix(f.fname, f.binder, param_type, f.result_type, f.metric,
                            f.body, e->span);
            if (f.fname == x)
              return mk_fix(f.fname, f.binder, param_type,
                            subst_t(f.result_type, x, a, fva), f.metric, f.body,
                            e->span);
            std::string fname = f.fname;
            std::string binder = f.binder;
            ExprPtr body = f.body;
            RTypePtr result_type = f.result_type;
            MetricSpec metric = f.metric.value_or(MetricSpec{});
            bool has_metric = f.metric.has_value();
            // Metric entries mention parameters only; they follow alpha
            // renames of the first parameter but are never substituted into.
            auto rename = [&](const std::string& old, const std::string& neu) {
              body = subst_e(body, old, mk_var(neu), {neu});
              if (has_metric)
                for (auto& m : metric.entries)
                  m = subst_e(m, old, mk_var(neu), {neu});
            };
            if (fva.count(binder)) {
              std::set<std::string> avoid = fva;
              collect_free_vars(body, avoid);
              collect_free_vars(result_type, avoid);
              std::string renamed = fresh_name(binder, avoid);
              result_type = subst_t(result_type, binder, mk_var(renamed), {renamed});
              rename(binder, renamed);
              binder = renamed;
            }
            if (fva.count(fname)) {
              std::set<std::string> avoid = fva;
              collect_free_vars(body, avoid);
              std::string renamed = fresh_name(fname, avoid);
              rename(fname, renamed);
              fname = renamed;
            }
            return mk_fix(fname, binder, param_type,
                          subst_t(result_type, x, a, fva),
                          has_metric ? std::optional<MetricSpec>(metric)
                                     : std::nullopt,
                          subst_e(body, x, a, fva), e->span);
          },
          [&](const IfE& i) -> ExprPtr {
            return mk_if(subst_e(i.cond, x, a, fva), subst_e(i.then_e, x, a, fva),
                         subst_e(i.else_e, x, a, fva), e->span);
          }},
      e->node);
}

}  // namespace

ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const ExprPtr& a) {
  return subst_e(e, x, a, free_vars(a));
}
RTypePtr subst_type(const RTypePtr& t, const std::string& x, const ExprPtr& a) {
  return subst_t(t, x, a, free_vars(a));
}

}  // namespace lazyref
