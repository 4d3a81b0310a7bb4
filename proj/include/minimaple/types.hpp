// The MiniMaple type lattice.
//
// Types are immutable values with structural equality. `Or` members form a
// set: equality ignores member order, while rendering keeps the order in
// which members were first introduced (so `lub(integer, float)` prints as
// `Or(integer,float)`).
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minimaple {

enum class TypeKind {
  Integer,
  Float,
  Boolean,
  String,
  Symbol,
  Anything,
  List,
  Tuple,
  Or,
  Proc,
  Abstract,  // uninterpreted type introduced by a `type Name;` annotation
};

class Type {
 public:
  /// Defaults to `anything`.
  Type();

  static Type integer();
  static Type float_();
  static Type boolean();
  static Type string();
  static Type symbol();
  static Type anything();
  static Type list(Type elem);
  static Type tuple(std::vector<Type> elems);
  /// Normalized union; may collapse to a non-union type.
  static Type union_of(std::vector<Type> members);
  /// Union exactly as given, without normalization. Used by the parser and
  /// by tests of `normalize`.
  static Type raw_union(std::vector<Type> members);
  static Type proc(std::vector<Type> params, Type ret);
  static Type abstract(std::string name);

  TypeKind kind() const;
  bool is(TypeKind k) const { return kind() == k; }
  bool is_base() const;

  /// List element, tuple elements, union members, or proc params.
  const std::vector<Type>& children() const;
  const Type& elem() const;         // List only
  const Type& proc_return() const;  // Proc only
  const std::string& name() const;  // Abstract only

  /// Canonical rendering: `Or(integer,float)`, `list(T)`, `[T1,T2]`.
  std::string str() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Rep;
  explicit Type(std::shared_ptr<const Rep> rep);
  std::shared_ptr<const Rep> rep_;
};

/// Result of `meet`/`subtract`: nullopt means the empty type.
using MaybeType = std::optional<Type>;

bool is_subtype(const Type& s, const Type& t);

/// Flattens nested unions, removes duplicate and subsumed members, collapses
/// a union containing `anything`, and unwraps singleton unions. Recurses
/// into constructor arguments. Idempotent.
Type normalize(const Type& t);

/// Least upper bound: the larger argument when one subsumes the other,
/// otherwise their normalized union.
Type lub(const Type& s, const Type& t);

/// Greatest lower bound, or nullopt when no value can inhabit both.
MaybeType meet(const Type& u, const Type& t);

/// Members of union `u` that are not subtypes of `t`. A non-union `u` is
/// returned unchanged.
MaybeType subtract(const Type& u, const Type& t);

/// True for integer, float, and unions of the two.
bool is_numeric(const Type& t);

/// Members of a union, or the type itself.
std::vector<Type> union_members(const Type& t);

std::string to_string(const MaybeType& t);

}  // namespace minimaple
