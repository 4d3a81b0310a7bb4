#include "minimaple/value.hpp"

#include <cmath>
#include <cstdio>

#include "minimaple/ast.hpp"

namespace minimaple {

const std::vector<Value>* Value::items() const {
  if (const auto* l = std::get_if<List>(&data)) return &l->items;
  if (const auto* t = std::get_if<Tuple>(&data)) return &t->items;
  return nullptr;
}

std::vector<Value>* Value::items() {
  if (auto* l = std::get_if<List>(&data)) return &l->items;
  if (auto* t = std::get_if<Tuple>(&data)) return &t->items;
  return nullptr;
}

std::string format_float(double v) {
  if (std::isnan(v)) return "undefined";
  if (std::isinf(v)) return v > 0 ? "Float(infinity)" : "-Float(infinity)";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string render_items(const std::vector<Value>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += render(xs[i]);
  }
  return out + "]";
}

Type signature(const ProcExpr& p) {
  std::vector<Type> params;
  for (const auto& prm : p.params) params.push_back(prm.annotated ? prm.type : Type::anything());
  return Type::proc(std::move(params), p.return_annotated ? p.return_type : Type::anything());
}

}  // namespace

std::string render(const Value& v) {
  struct R {
    std::string operator()(const BigInt& i) const { return i.str(); }
    std::string operator()(double d) const { return format_float(d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Value::Str& s) const { return '"' + s.text + '"'; }
    std::string operator()(const Value::Sym& s) const { return s.name; }
    std::string operator()(const Value::List& l) const { return render_items(l.items); }
    std::string operator()(const Value::Tuple& t) const { return render_items(t.items); }
    std::string operator()(const Value::Proc& p) const {
      return p.proc ? signature(*p.proc).str() : "proc";
    }
  };
  return std::visit(R{}, v.data);
}

Type runtime_type(const Value& v) {
  struct R {
    Type operator()(const BigInt&) const { return Type::integer(); }
    Type operator()(double) const { return Type::float_(); }
    Type operator()(bool) const { return Type::boolean(); }
    Type operator()(const Value::Str&) const { return Type::string(); }
    Type operator()(const Value::Sym&) const { return Type::symbol(); }
    Type operator()(const Value::List& l) const {
      if (l.items.empty()) return Type::list(Type::anything());
      Type acc = runtime_type(l.items.front());
      for (std::size_t i = 1; i < l.items.size(); ++i) acc = lub(acc, runtime_type(l.items[i]));
      return Type::list(acc);
    }
    Type operator()(const Value::Tuple& t) const {
      std::vector<Type> elems;
      for (const auto& x : t.items) elems.push_back(runtime_type(x));
      return Type::tuple(std::move(elems));
    }
    Type operator()(const Value::Proc& p) const {
      return p.proc ? signature(*p.proc) : Type::anything();
    }
  };
  return std::visit(R{}, v.data);
}

bool conforms(const Value& v, const Type& t) {
  switch (t.kind()) {
    case TypeKind::Anything:
      return true;
    case TypeKind::Or:
      for (const auto& m : t.children()) {
        if (conforms(v, m)) return true;
      }
      return false;
    case TypeKind::Integer:
      return v.is<BigInt>();
    case TypeKind::Float:
      return v.is<double>();
    case TypeKind::Boolean:
      return v.is<bool>();
    case TypeKind::String:
      return v.is<Value::Str>();
    case TypeKind::Symbol:
      return v.is<Value::Sym>();
    case TypeKind::List:
      if (!v.is<Value::List>()) return false;
      for (const auto& x : v.get<Value::List>().items) {
        if (!conforms(x, t.elem())) return false;
      }
      return true;
    case TypeKind::Tuple: {
      if (!v.is<Value::Tuple>()) return false;
      const auto& xs = v.get<Value::Tuple>().items;
      if (xs.size() != t.children().size()) return false;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!conforms(xs[i], t.children()[i])) return false;
      }
      return true;
    }
    case TypeKind::Proc:
      return v.is<Value::Proc>() && is_subtype(runtime_type(v), t);
    case TypeKind::Abstract:
      return false;
  }
  return false;
}

Value coerce(const Value& v, const Type& t) {
  const std::vector<Value>* xs = v.items();
  if (!xs) return v;
  switch (t.kind()) {
    case TypeKind::Tuple: {
      if (xs->size() != t.children().size()) return v;
      std::vector<Value> out;
      for (std::size_t i = 0; i < xs->size(); ++i) out.push_back(coerce((*xs)[i], t.children()[i]));
      return Value::tuple(std::move(out));
    }
    case TypeKind::List: {
      if (!v.is<Value::List>()) return v;
      std::vector<Value> out;
      for (const auto& x : *xs) out.push_back(coerce(x, t.elem()));
      return Value::list(std::move(out));
    }
    case TypeKind::Or: {
      // Tuple members first, matching how bracket literals are typed.
      for (const auto& m : t.children()) {
        if (m.is(TypeKind::Tuple) && m.children().size() == xs->size()) {
          Value c = coerce(v, m);
          if (conforms(c, m)) return c;
        }
      }
      for (const auto& m : t.children()) {
        Value c = coerce(v, m);
        if (conforms(c, m)) return c;
      }
      return v;
    }
    default:
      return v;
  }
}

double to_double(const Value& v) {
  if (v.is<double>()) return v.get<double>();
  return v.get<BigInt>().convert_to<double>();
}

std::optional<int> compare_numbers(const Value& a, const Value& b) {
  if (a.is<BigInt>() && b.is<BigInt>()) {
    const BigInt& x = a.get<BigInt>();
    const BigInt& y = b.get<BigInt>();
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (a.is<double>() && b.is<double>()) {
    double x = a.get<double>();
    double y = b.get<double>();
    if (std::isnan(x) || std::isnan(y)) return std::nullopt;
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  // Mixed: compare the integer against the float exactly.
  const bool int_first = a.is<BigInt>();
  const BigInt& i = int_first ? a.get<BigInt>() : b.get<BigInt>();
  const double d = int_first ? b.get<double>() : a.get<double>();
  if (std::isnan(d)) return std::nullopt;
  int r;
  if (std::isinf(d)) {
    r = d > 0 ? -1 : 1;
  } else {
    const double fl = std::floor(d);
    const BigInt f(fl);
    if (i < f) {
      r = -1;
    } else if (i > f) {
      r = 1;
    } else {
      r = d == fl ? 0 : -1;
    }
  }
  return int_first ? r : -r;
}

bool values_equal(const Value& a, const Value& b) {
  if (a.is_number() && b.is_number()) {
    auto c = compare_numbers(a, b);
    return c && *c == 0;
  }
  const auto* xa = a.items();
  const auto* xb = b.items();
  if (xa && xb) {
    if (xa->size() != xb->size()) return false;
    for (std::size_t i = 0; i < xa->size(); ++i) {
      if (!values_equal((*xa)[i], (*xb)[i])) return false;
    }
    return true;
  }
  if (a.data.index() != b.data.index()) return false;
  if (a.is<bool>()) return a.get<bool>() == b.get<bool>();
  if (a.is<Value::Str>()) return a.get<Value::Str>().text == b.get<Value::Str>().text;
  if (a.is<Value::Sym>()) return a.get<Value::Sym>().name == b.get<Value::Sym>().name;
  if (a.is<Value::Proc>()) return a.get<Value::Proc>().proc == b.get<Value::Proc>().proc;
  return false;
}

}  // namespace minimaple
