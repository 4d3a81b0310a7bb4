#include "typing_rules.hpp"

namespace minimaple::rules {

namespace {

const Type& number() {
  static const Type kNumber = Type::union_of({Type::integer(), Type::float_()});
  return kNumber;
}

}  // namespace

bool boolean_like(const Type& t) {
  return t.is(TypeKind::Anything) || is_subtype(t, Type::boolean());
}

bool integer_like(const Type& t) {
  return t.is(TypeKind::Anything) || is_subtype(t, Type::integer());
}

bool numeric_like(const Type& t) { return t.is(TypeKind::Anything) || is_numeric(t); }

MaybeType arithmetic(BinaryOp op, const Type& a, const Type& b) {
  if (!numeric_like(a) || !numeric_like(b)) return std::nullopt;
  if (a.is(TypeKind::Anything) || b.is(TypeKind::Anything)) return Type::anything();
  if (op == BinaryOp::Div) return Type::float_();
  const Type integer = Type::integer();
  const Type flt = Type::float_();
  if (is_subtype(a, integer) && is_subtype(b, integer)) return integer;
  if (is_subtype(a, flt) || is_subtype(b, flt)) return flt;
  return number();
}

MaybeType negate(const Type& t) {
  if (!numeric_like(t)) return std::nullopt;
  return t;
}

bool comparable(BinaryOp op, const Type& a, const Type& b) {
  if (op == BinaryOp::Eq || op == BinaryOp::NotEq) {
    if (a.is(TypeKind::Anything) || b.is(TypeKind::Anything)) return true;
    if (is_numeric(a) && is_numeric(b)) return true;
    return meet(a, b).has_value();
  }
  return numeric_like(a) && numeric_like(b);
}

std::optional<long long> literal_int(const Expr& e) {
  if (const auto* i = e.as<IntLit>()) {
    if (i->digits.size() > 18) return std::nullopt;
    return std::stoll(i->digits);
  }
  if (const auto* u = e.as<Unary>()) {
    if (u->op == UnaryOp::Neg) {
      if (auto v = literal_int(*u->operand)) return -*v;
    }
  }
  return std::nullopt;
}

IndexOutcome index(const Type& base, const Type& idx, const Expr& index_expr) {
  if (!integer_like(idx)) return {std::nullopt, "index of type " + idx.str() + " is not an integer"};
  switch (base.kind()) {
    case TypeKind::Anything:
      return {Type::anything(), {}};
    case TypeKind::List:
      return {base.elem(), {}};
    case TypeKind::Tuple: {
      const auto& elems = base.children();
      if (elems.empty()) return {std::nullopt, "cannot index the empty tuple"};
      if (auto k = literal_int(index_expr)) {
        if (*k < 1 || *k > static_cast<long long>(elems.size())) {
          return {std::nullopt, "index " + std::to_string(*k) + " is out of range for " + base.str()};
        }
        return {elems[static_cast<std::size_t>(*k - 1)], {}};
      }
      Type acc = elems.front();
      for (std::size_t i = 1; i < elems.size(); ++i) acc = lub(acc, elems[i]);
      return {acc, {}};
    }
    case TypeKind::Or: {
      std::optional<Type> acc;
      for (const auto& m : base.children()) {
        IndexOutcome part = index(m, idx, index_expr);
        if (!part.type) return {std::nullopt, "cannot index a value of type " + base.str()};
        acc = acc ? lub(*acc, *part.type) : *part.type;
      }
      return {acc, {}};
    }
    default:
      return {std::nullopt, "cannot index a value of type " + base.str()};
  }
}

MaybeType element_type(const Type& collection) {
  switch (collection.kind()) {
    case TypeKind::Anything:
      return Type::anything();
    case TypeKind::List:
      return collection.elem();
    case TypeKind::Tuple: {
      const auto& elems = collection.children();
      if (elems.empty()) return Type::anything();
      Type acc = elems.front();
      for (std::size_t i = 1; i < elems.size(); ++i) acc = lub(acc, elems[i]);
      return acc;
    }
    case TypeKind::Or: {
      std::optional<Type> acc;
      for (const auto& m : collection.children()) {
        auto e = element_type(m);
        if (!e) return std::nullopt;
        acc = acc ? lub(*acc, *e) : *e;
      }
      return acc;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace minimaple::rules
