// Runtime values of the MiniMaple interpreter.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "minimaple/types.hpp"

namespace minimaple {

struct ProcExpr;

using BigInt = boost::multiprecision::cpp_int;

struct Value {
  struct Str {
    std::string text;
  };
  struct Sym {
    std::string name;
  };
  struct List {
    std::vector<Value> items;
  };
  struct Tuple {
    std::vector<Value> items;
  };
  struct Proc {
    const ProcExpr* proc = nullptr;
  };
  using Data = std::variant<BigInt, double, bool, Str, Sym, List, Tuple, Proc>;

  Data data;

  static Value integer(BigInt v) { return {Data(std::move(v))}; }
  static Value flt(double v) { return {Data(v)}; }
  static Value boolean(bool v) { return {Data(v)}; }
  static Value str(std::string s) { return {Data(Str{std::move(s)})}; }
  static Value sym(std::string s) { return {Data(Sym{std::move(s)})}; }
  static Value list(std::vector<Value> xs) { return {Data(List{std::move(xs)})}; }
  static Value tuple(std::vector<Value> xs) { return {Data(Tuple{std::move(xs)})}; }
  static Value proc(const ProcExpr* p) { return {Data(Proc{p})}; }

  template <class T>
  bool is() const { return std::holds_alternative<T>(data); }
  template <class T>
  const T& get() const { return std::get<T>(data); }
  template <class T>
  T& get() { return std::get<T>(data); }

  bool is_number() const { return is<BigInt>() || is<double>(); }
  /// Elements of a list or tuple, or null.
  const std::vector<Value>* items() const;
  std::vector<Value>* items();
};

/// Floats print with 10 significant digits and always show a decimal point
/// or exponent (`1.0`, `12849.76224`).
std::string format_float(double v);

/// Maple-style rendering: `[720, 12849.76224]`, `"text"`, `true`.
std::string render(const Value& v);

/// Most specific type of a value. The empty list has type list(anything).
Type runtime_type(const Value& v);

/// Whether `v` inhabits `t`. Unlike subtyping on runtime_type, an empty
/// list inhabits every list type.
bool conforms(const Value& v, const Type& t);

/// Converts bracket values to the shape `t` expects: a list of the right
/// arity becomes a tuple when `t` (or a member of a union `t`) is a tuple.
Value coerce(const Value& v, const Type& t);

/// Structural equality; numbers compare by exact value across integer and
/// float, and lists compare equal to tuples with equal elements.
bool values_equal(const Value& a, const Value& b);

/// Exact numeric three-way comparison; both values must be numbers. Returns
/// nullopt when a NaN is involved.
std::optional<int> compare_numbers(const Value& a, const Value& b);

double to_double(const Value& v);

}  // namespace minimaple
