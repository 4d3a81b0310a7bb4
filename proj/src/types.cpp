#include "minimaple/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace minimaple {

struct Type::Rep {
  TypeKind kind;
  std::vector<Type> children;
  std::string name;
  std::vector<Type> ret;  // Proc only: exactly one element
};

namespace {

const std::vector<Type>& empty_children() {
  static const std::vector<Type> kEmpty;
  return kEmpty;
}

}  // namespace

Type::Type(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}

Type::Type() : Type(anything()) {}

#define MINIMAPLE_BASE_TYPE(fn, kind_)                                         \
  Type Type::fn() {                                                            \
    static const Type kT(std::make_shared<const Rep>(Rep{kind_, {}, {}, {}}));     \
    return kT;                                                                 \
  }
MINIMAPLE_BASE_TYPE(integer, TypeKind::Integer)
MINIMAPLE_BASE_TYPE(float_, TypeKind::Float)
MINIMAPLE_BASE_TYPE(boolean, TypeKind::Boolean)
MINIMAPLE_BASE_TYPE(string, TypeKind::String)
MINIMAPLE_BASE_TYPE(symbol, TypeKind::Symbol)
#undef MINIMAPLE_BASE_TYPE

Type Type::anything() {
  static const Type kT(std::make_shared<const Rep>(Rep{TypeKind::Anything, {}, {}, {}}));
  return kT;
}

Type Type::list(Type elem) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::List, {std::move(elem)}, {}, {}}));
}

Type Type::tuple(std::vector<Type> elems) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Tuple, std::move(elems), {}, {}}));
}

Type Type::raw_union(std::vector<Type> members) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Or, std::move(members), {}, {}}));
}

Type Type::union_of(std::vector<Type> members) {
  if (members.empty()) throw std::invalid_argument("union of no types");
  return normalize(raw_union(std::move(members)));
}

Type Type::proc(std::vector<Type> params, Type ret) {
  return Type(std::make_shared<const Rep>(
      Rep{TypeKind::Proc, std::move(params), {}, {std::move(ret)}}));
}

Type Type::abstract(std::string name) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Abstract, {}, std::move(name), {}}));
}

TypeKind Type::kind() const { return rep_->kind; }

bool Type::is_base() const {
  switch (kind()) {
    case TypeKind::Integer:
    case TypeKind::Float:
    case TypeKind::Boolean:
    case TypeKind::String:
    case TypeKind::Symbol:
    case TypeKind::Abstract:
      return true;
    default:
      return false;
  }
}

const std::vector<Type>& Type::children() const {
  return rep_->children.empty() ? empty_children() : rep_->children;
}

const Type& Type::elem() const { return rep_->children.at(0); }

const Type& Type::proc_return() const { return rep_->ret.at(0); }

const std::string& Type::name() const { return rep_->name; }

namespace {

void join(std::string& out, const std::vector<Type>& ts) {
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) out += ',';
    out += ts[i].str();
  }
}

}  // namespace

std::string Type::str() const {
  switch (kind()) {
    case TypeKind::Integer: return "integer";
    case TypeKind::Float: return "float";
    case TypeKind::Boolean: return "boolean";
    case TypeKind::String: return "string";
    case TypeKind::Symbol: return "symbol";
    case TypeKind::Anything: return "anything";
    case TypeKind::Abstract: return rep_->name;
    case TypeKind::List: return "list(" + elem().str() + ")";
    case TypeKind::Tuple: {
      std::string out = "[";
      join(out, rep_->children);
      return out + "]";
    }
    case TypeKind::Or: {
      std::string out = "Or(";
      join(out, rep_->children);
      return out + ")";
    }
    case TypeKind::Proc: {
      std::string out = "proc(";
      join(out, rep_->children);
      return out + ")::" + proc_return().str();
    }
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.kind() != b.kind()) return false;
  const auto& ac = a.rep_->children;
  const auto& bc = b.rep_->children;
  switch (a.kind()) {
    case TypeKind::Abstract:
      return a.rep_->name == b.rep_->name;
    case TypeKind::Or: {
      // Set equality over members.
      auto covered = [](const std::vector<Type>& xs, const std::vector<Type>& ys) {
        return std::all_of(xs.begin(), xs.end(), [&](const Type& x) {
          return std::find(ys.begin(), ys.end(), x) != ys.end();
        });
      };
      return covered(ac, bc) && covered(bc, ac);
    }
    case TypeKind::Proc:
      return ac == bc && a.rep_->ret == b.rep_->ret;
    default:
      return ac == bc;
  }
}

bool is_subtype(const Type& s, const Type& t) {
  if (t.is(TypeKind::Anything)) return true;
  if (s.is(TypeKind::Or)) {
    const auto& ms = s.children();
    return std::all_of(ms.begin(), ms.end(), [&](const Type& m) { return is_subtype(m, t); });
  }
  if (t.is(TypeKind::Or)) {
    const auto& ms = t.children();
    return std::any_of(ms.begin(), ms.end(), [&](const Type& m) { return is_subtype(s, m); });
  }
  if (s.kind() != t.kind()) return false;
  switch (s.kind()) {
    case TypeKind::Abstract:
      return s.name() == t.name();
    case TypeKind::List:
      return is_subtype(s.elem(), t.elem());
    case TypeKind::Tuple: {
      const auto& a = s.children();
      const auto& b = t.children();
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!is_subtype(a[i], b[i])) return false;
      }
      return true;
    }
    case TypeKind::Proc: {
      const auto& a = s.children();
      const auto& b = t.children();
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!is_subtype(b[i], a[i])) return false;
      }
      return is_subtype(s.proc_return(), t.proc_return());
    }
    default:
      return true;  // identical base kinds
  }
}

Type normalize(const Type& t) {
  switch (t.kind()) {
    case TypeKind::List:
      return Type::list(normalize(t.elem()));
    case TypeKind::Tuple: {
      std::vector<Type> elems;
      for (const auto& e : t.children()) elems.push_back(normalize(e));
      return Type::tuple(std::move(elems));
    }
    case TypeKind::Proc: {
      std::vector<Type> params;
      for (const auto& p : t.children()) params.push_back(normalize(p));
      return Type::proc(std::move(params), normalize(t.proc_return()));
    }
    case TypeKind::Or:
      break;
    default:
      return t;
  }

  std::vector<Type> flat;
  for (const auto& m : t.children()) {
    Type n = normalize(m);
    if (n.is(TypeKind::Anything)) return Type::anything();
    if (n.is(TypeKind::Or)) {
      for (const auto& inner : n.children()) flat.push_back(inner);
    } else {
      flat.push_back(n);
    }
  }
  if (flat.empty()) throw std::invalid_argument("union of no types");

  std::vector<Type> kept;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    bool drop = false;
    for (std::size_t j = 0; j < flat.size() && !drop; ++j) {
      if (i == j || !is_subtype(flat[i], flat[j])) continue;
      // Strictly smaller members go; among equivalent members the first stays.
      drop = !is_subtype(flat[j], flat[i]) || j < i;
    }
    if (!drop) kept.push_back(flat[i]);
  }
  if (kept.size() == 1) return kept.front();
  return Type::raw_union(std::move(kept));
}

Type lub(const Type& s, const Type& t) {
  if (is_subtype(t, s)) return s;
  if (is_subtype(s, t)) return t;
  // The union is least: pushing the join inside list or tuple constructors
  // (list(Or(integer,float)) for list(integer) and list(float)) gives an
  // upper bound that also admits mixed lists.
  return Type::union_of({s, t});
}

MaybeType meet(const Type& u, const Type& t) {
  if (u.is(TypeKind::Anything)) return t;
  if (t.is(TypeKind::Anything)) return u;
  if (u.is(TypeKind::Or) || t.is(TypeKind::Or)) {
    const bool split_left = u.is(TypeKind::Or);
    std::vector<Type> parts;
    for (const auto& m : (split_left ? u : t).children()) {
      auto part = split_left ? meet(m, t) : meet(u, m);
      if (part) parts.push_back(*part);
    }
    if (parts.empty()) return std::nullopt;
    return Type::union_of(std::move(parts));
  }
  if (is_subtype(u, t)) return u;
  if (is_subtype(t, u)) return t;
  if (u.is(TypeKind::List) && t.is(TypeKind::List)) {
    auto e = meet(u.elem(), t.elem());
    if (!e) return std::nullopt;
    return Type::list(*e);
  }
  if (u.is(TypeKind::Tuple) && t.is(TypeKind::Tuple) &&
      u.children().size() == t.children().size()) {
    std::vector<Type> elems;
    for (std::size_t i = 0; i < u.children().size(); ++i) {
      auto e = meet(u.children()[i], t.children()[i]);
      if (!e) return std::nullopt;
      elems.push_back(*e);
    }
    return Type::tuple(std::move(elems));
  }
  return std::nullopt;
}

MaybeType subtract(const Type& u, const Type& t) {
  if (!u.is(TypeKind::Or)) return u;
  std::vector<Type> survivors;
  for (const auto& m : u.children()) {
    if (!is_subtype(m, t)) survivors.push_back(m);
  }
  if (survivors.empty()) return std::nullopt;
  return Type::union_of(std::move(survivors));
}

bool is_numeric(const Type& t) {
  static const Type kNumber = Type::union_of({Type::integer(), Type::float_()});
  return is_subtype(t, kNumber);
}

std::vector<Type> union_members(const Type& t) {
  if (t.is(TypeKind::Or)) return t.children();
  return {t};
}

std::string to_string(const MaybeType& t) { return t ? t->str() : "<empty>"; }

}  // namespace minimaple
