#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace og {

/// Declared domain of a state variable. Every natural carries a bound so the
/// induced state space is finite.
enum class TypeKind : std::uint8_t { Bool, Nat, Set, Stack, Option, Pair, Map };

struct Type {
  TypeKind kind = TypeKind::Bool;
  // Nat/Set: elements lie in [0, bound). Map: keys lie in [0, bound).
  std::uint32_t bound = 0;
  // Stack only; 0 means no declared maximum length.
  std::uint32_t max_len = 0;
  // Stack/Option: element type. Pair: both components. Map: value type.
  // Empty for the element type of `[]`, `{}` and `none` literals.
  std::vector<Type> args;

  static Type boolean();
  static Type nat(std::uint32_t bound);
  static Type set(std::uint32_t bound);
  static Type stack(Type elem, std::uint32_t max_len = 0);
  static Type option(Type elem);
  static Type pair(Type first, Type second);
  static Type map(std::uint32_t key_bound, Type value);

  bool operator==(const Type&) const = default;

  const Type& elem() const { return args.at(0); }
  bool has_elem() const { return !args.empty(); }

  std::string str() const;
};

/// Structural compatibility ignoring bounds; missing element types match anything.
bool compatible(const Type& a, const Type& b);

enum class ValueKind : std::uint8_t { Bool, Nat, Set, Stack, None, Some, Pair, Map };

/// Immutable-by-convention runtime value. Sets are bitmasks over [0, 64);
/// stacks keep the most recent element at index 0; maps are partial functions
/// stored as key-sorted (key, payload) pairs where an absent key reads as none.
class Value {
 public:
  Value() = default;

  static Value boolean(bool b);
  static Value nat(std::uint32_t n);
  static Value set(std::uint64_t bits);
  static Value set_of(std::initializer_list<std::uint32_t> elems);
  static Value stack(std::vector<Value> items);
  static Value nat_stack(std::initializer_list<std::uint32_t> elems);
  static Value none();
  static Value some(Value v);
  static Value pair(Value first, Value second);
  static Value map(std::vector<std::pair<std::uint32_t, Value>> entries);

  ValueKind kind() const { return kind_; }

  bool as_bool() const;
  std::uint32_t as_nat() const;
  std::uint64_t as_set() const;
  const std::vector<Value>& as_stack() const;
  bool is_some() const;
  const Value& the() const;
  const Value& first() const;
  const Value& second() const;

  // Map access
  Value map_get(std::uint32_t key) const;
  Value map_set(std::uint32_t key, const Value& opt) const;
  std::vector<std::pair<std::uint32_t, const Value*>> map_entries() const;

  bool set_contains(std::uint32_t n) const;

  bool operator==(const Value& o) const;
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const;

  std::size_t hash() const;

  /// Self-describing canonical byte encoding (used for visited sets and digests).
  void encode(std::string& out) const;
  static Value decode(std::string_view in, std::size_t& pos);

  /// True iff the value inhabits `t` including all bounds.
  bool conforms(const Type& t) const;

  std::string str() const;

 private:
  ValueKind kind_ = ValueKind::Bool;
  std::uint64_t bits_ = 0;
  std::vector<Value> items_;
};

/// Number of values inhabiting `t`, saturating at `cap`. Throws UnboundedDomain
/// for stacks without a maximum length.
std::uint64_t domain_size(const Type& t, std::uint64_t cap);

/// All values of `t` in a fixed canonical order.
std::vector<Value> enumerate_domain(const Type& t);

}  // namespace og
