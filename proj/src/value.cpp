#include "og/value.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "og/errors.hpp"

namespace og {

namespace {

[[noreturn]] void mismatch(const char* want, const Value& got) {
  throw EvalError(EvalErrorKind::TypeMismatch,
                  std::string("expected ") + want + ", got " + got.str());
}

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t get_varint(std::string_view in, std::size_t& pos) {
  std::uint64_t v = 0;
  int shift = 0;
  while (true) {
    if (pos >= in.size()) throw std::runtime_error("truncated value encoding");
    auto b = static_cast<std::uint8_t>(in[pos++]);
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) break;
    shift += 7;
  }
  return v;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap;
  return std::min(a * b, cap);
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  return (a > cap - std::min(b, cap)) ? cap : std::min(a + b, cap);
}

}  // namespace

// ---------------------------------------------------------------------------
// Type

Type Type::boolean() { return Type{}; }
Type Type::nat(std::uint32_t bound) { return Type{TypeKind::Nat, bound, 0, {}}; }
Type Type::set(std::uint32_t bound) { return Type{TypeKind::Set, bound, 0, {}}; }
Type Type::stack(Type elem, std::uint32_t max_len) {
  return Type{TypeKind::Stack, 0, max_len, {std::move(elem)}};
}
Type Type::option(Type elem) { return Type{TypeKind::Option, 0, 0, {std::move(elem)}}; }
Type Type::pair(Type first, Type second) {
  return Type{TypeKind::Pair, 0, 0, {std::move(first), std::move(second)}};
}
Type Type::map(std::uint32_t key_bound, Type value) {
  return Type{TypeKind::Map, key_bound, 0, {std::move(value)}};
}

std::string Type::str() const {
  auto arg = [&](std::size_t i) { return i < args.size() ? args[i].str() : std::string("?"); };
  switch (kind) {
    case TypeKind::Bool: return "bool";
    case TypeKind::Nat: return "nat<" + std::to_string(bound) + ">";
    case TypeKind::Set: return "set<" + std::to_string(bound) + ">";
    case TypeKind::Stack:
      return "stack<" + arg(0) + (max_len ? ", " + std::to_string(max_len) : "") + ">";
    case TypeKind::Option: return "option<" + arg(0) + ">";
    case TypeKind::Pair: return "pair<" + arg(0) + ", " + arg(1) + ">";
    case TypeKind::Map: return "map<" + std::to_string(bound) + ", " + arg(0) + ">";
  }
  return "?";
}

bool compatible(const Type& a, const Type& b) {
  if (a.kind != b.kind) return false;
  if (a.args.empty() || b.args.empty()) return true;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!compatible(a.args[i], b.args[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Value construction and access

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = ValueKind::Bool;
  v.bits_ = b ? 1 : 0;
  return v;
}

Value Value::nat(std::uint32_t n) {
  Value v;
  v.kind_ = ValueKind::Nat;
  v.bits_ = n;
  return v;
}

Value Value::set(std::uint64_t bits) {
  Value v;
  v.kind_ = ValueKind::Set;
  v.bits_ = bits;
  return v;
}

Value Value::set_of(std::initializer_list<std::uint32_t> elems) {
  std::uint64_t bits = 0;
  for (auto e : elems) {
    if (e >= 64) throw EvalError(EvalErrorKind::DomainViolation, "set element >= 64");
    bits |= std::uint64_t{1} << e;
  }
  return set(bits);
}

Value Value::stack(std::vector<Value> items) {
  Value v;
  v.kind_ = ValueKind::Stack;
  v.items_ = std::move(items);
  return v;
}

Value Value::nat_stack(std::initializer_list<std::uint32_t> elems) {
  std::vector<Value> items;
  for (auto e : elems) items.push_back(nat(e));
  return stack(std::move(items));
}

Value Value::none() {
  Value v;
  v.kind_ = ValueKind::None;
  return v;
}

Value Value::some(Value inner) {
  Value v;
  v.kind_ = ValueKind::Some;
  v.items_.push_back(std::move(inner));
  return v;
}

Value Value::pair(Value first, Value second) {
  Value v;
  v.kind_ = ValueKind::Pair;
  v.items_.reserve(2);
  v.items_.push_back(std::move(first));
  v.items_.push_back(std::move(second));
  return v;
}

Value Value::map(std::vector<std::pair<std::uint32_t, Value>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Value v;
  v.kind_ = ValueKind::Map;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].first == entries[i - 1].first)
      throw EvalError(EvalErrorKind::TypeMismatch, "duplicate key in map literal");
    v.items_.push_back(pair(nat(entries[i].first), std::move(entries[i].second)));
  }
  return v;
}

bool Value::as_bool() const {
  if (kind_ != ValueKind::Bool) mismatch("bool", *this);
  return bits_ != 0;
}

std::uint32_t Value::as_nat() const {
  if (kind_ != ValueKind::Nat) mismatch("nat", *this);
  return static_cast<std::uint32_t>(bits_);
}

std::uint64_t Value::as_set() const {
  if (kind_ != ValueKind::Set) mismatch("set", *this);
  return bits_;
}

const std::vector<Value>& Value::as_stack() const {
  if (kind_ != ValueKind::Stack) mismatch("stack", *this);
  return items_;
}

bool Value::is_some() const {
  if (kind_ == ValueKind::Some) return true;
  if (kind_ == ValueKind::None) return false;
  mismatch("option", *this);
}

const Value& Value::the() const {
  if (kind_ == ValueKind::None)
    throw EvalError(EvalErrorKind::AbsentOptional, "projection of an absent optional");
  if (kind_ != ValueKind::Some) mismatch("option", *this);
  return items_[0];
}

const Value& Value::first() const {
  if (kind_ != ValueKind::Pair) mismatch("pair", *this);
  return items_[0];
}

const Value& Value::second() const {
  if (kind_ != ValueKind::Pair) mismatch("pair", *this);
  return items_[1];
}

Value Value::map_get(std::uint32_t key) const {
  if (kind_ != ValueKind::Map) mismatch("map", *this);
  for (const auto& e : items_) {
    auto k = e.items_[0].bits_;
    if (k == key) return some(e.items_[1]);
    if (k > key) break;
  }
  return none();
}

Value Value::map_set(std::uint32_t key, const Value& opt) const {
  if (kind_ != ValueKind::Map) mismatch("map", *this);
  bool present = opt.is_some();
  Value out;
  out.kind_ = ValueKind::Map;
  out.items_.reserve(items_.size() + 1);
  bool placed = false;
  for (const auto& e : items_) {
    auto k = e.items_[0].bits_;
    if (!placed && k >= key) {
      if (present) out.items_.push_back(pair(nat(key), opt.items_[0]));
      placed = true;
      if (k == key) continue;
    }
    out.items_.push_back(e);
  }
  if (!placed && present) out.items_.push_back(pair(nat(key), opt.items_[0]));
  return out;
}

std::vector<std::pair<std::uint32_t, const Value*>> Value::map_entries() const {
  if (kind_ != ValueKind::Map) mismatch("map", *this);
  std::vector<std::pair<std::uint32_t, const Value*>> out;
  for (const auto& e : items_)
    out.emplace_back(static_cast<std::uint32_t>(e.items_[0].bits_), &e.items_[1]);
  return out;
}

bool Value::set_contains(std::uint32_t n) const {
  return n < 64 && (as_set() >> n) & 1;
}

// ---------------------------------------------------------------------------
// Equality, ordering, hashing, encoding

bool Value::operator==(const Value& o) const {
  return kind_ == o.kind_ && bits_ == o.bits_ && items_ == o.items_;
}

bool Value::operator<(const Value& o) const {
  if (kind_ != o.kind_) return kind_ < o.kind_;
  if (bits_ != o.bits_) return bits_ < o.bits_;
  return std::lexicographical_compare(items_.begin(), items_.end(), o.items_.begin(),
                                      o.items_.end());
}

std::size_t Value::hash() const {
  std::size_t h = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL ^ bits_;
  for (const auto& it : items_) h = (h ^ it.hash()) * 0x100000001b3ULL + 0x9e3779b9;
  return h;
}

void Value::encode(std::string& out) const {
  out.push_back(static_cast<char>(kind_));
  switch (kind_) {
    case ValueKind::Bool:
    case ValueKind::Nat:
    case ValueKind::Set: put_varint(out, bits_); break;
    case ValueKind::None: break;
    case ValueKind::Some:
    case ValueKind::Pair: for (const auto& it : items_) it.encode(out); break;
    case ValueKind::Stack:
    case ValueKind::Map:
      put_varint(out, items_.size());
      for (const auto& it : items_) it.encode(out);
      break;
  }
}

Value Value::decode(std::string_view in, std::size_t& pos) {
  if (pos >= in.size()) throw std::runtime_error("truncated value encoding");
  Value v;
  v.kind_ = static_cast<ValueKind>(in[pos++]);
  switch (v.kind_) {
    case ValueKind::Bool:
    case ValueKind::Nat:
    case ValueKind::Set: v.bits_ = get_varint(in, pos); break;
    case ValueKind::None: break;
    case ValueKind::Some: v.items_.push_back(decode(in, pos)); break;
    case ValueKind::Pair:
      v.items_.push_back(decode(in, pos));
      v.items_.push_back(decode(in, pos));
      break;
    case ValueKind::Stack:
    case ValueKind::Map: {
      auto n = get_varint(in, pos);
      v.items_.reserve(n);
      for (std::uint64_t i = 0; i < n; ++i) v.items_.push_back(decode(in, pos));
      break;
    }
    default: throw std::runtime_error("bad value tag");
  }
  return v;
}

bool Value::conforms(const Type& t) const {
  switch (t.kind) {
    case TypeKind::Bool: return kind_ == ValueKind::Bool;
    case TypeKind::Nat: return kind_ == ValueKind::Nat && bits_ < t.bound;
    case TypeKind::Set:
      return kind_ == ValueKind::Set &&
             (t.bound >= 64 ? true : (bits_ >> t.bound) == 0);
    case TypeKind::Stack:
      if (kind_ != ValueKind::Stack) return false;
      if (t.max_len && items_.size() > t.max_len) return false;
      for (const auto& it : items_)
        if (t.has_elem() && !it.conforms(t.elem())) return false;
      return true;
    case TypeKind::Option:
      if (kind_ == ValueKind::None) return true;
      return kind_ == ValueKind::Some && (!t.has_elem() || items_[0].conforms(t.elem()));
    case TypeKind::Pair:
      return kind_ == ValueKind::Pair && items_[0].conforms(t.args.at(0)) &&
             items_[1].conforms(t.args.at(1));
    case TypeKind::Map:
      if (kind_ != ValueKind::Map) return false;
      for (const auto& e : items_) {
        if (e.items_[0].bits_ >= t.bound) return false;
        if (t.has_elem() && !e.items_[1].conforms(t.elem())) return false;
      }
      return true;
  }
  return false;
}

std::string Value::str() const {
  std::ostringstream os;
  switch (kind_) {
    case ValueKind::Bool: os << (bits_ ? "true" : "false"); break;
    case ValueKind::Nat: os << bits_; break;
    case ValueKind::Set: {
      os << '{';
      bool first = true;
      for (std::uint32_t i = 0; i < 64; ++i) {
        if ((bits_ >> i) & 1) {
          if (!first) os << ',';
          os << i;
          first = false;
        }
      }
      os << '}';
      break;
    }
    case ValueKind::Stack: {
      os << '[';
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) os << ',';
        os << items_[i].str();
      }
      os << ']';
      break;
    }
    case ValueKind::None: os << "none"; break;
    case ValueKind::Some: os << "some(" << items_[0].str() << ')'; break;
    case ValueKind::Pair:
      os << "pair(" << items_[0].str() << ',' << items_[1].str() << ')';
      break;
    case ValueKind::Map: {
      os << "map{";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) os << ',';
        os << items_[i].items_[0].bits_ << ':' << items_[i].items_[1].str();
      }
      os << '}';
      break;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Finite domains

std::uint64_t domain_size(const Type& t, std::uint64_t cap) {
  switch (t.kind) {
    case TypeKind::Bool: return std::min<std::uint64_t>(2, cap);
    case TypeKind::Nat: return std::min<std::uint64_t>(t.bound, cap);
    case TypeKind::Set:
      return t.bound >= 63 ? cap : std::min<std::uint64_t>(std::uint64_t{1} << t.bound, cap);
    case TypeKind::Stack: {
      if (t.max_len == 0) throw UnboundedDomain("stack without maximum length: " + t.str());
      auto e = domain_size(t.elem(), cap);
      std::uint64_t total = 0, layer = 1;
      for (std::uint32_t len = 0; len <= t.max_len; ++len) {
        total = sat_add(total, layer, cap);
        layer = sat_mul(layer, e, cap);
      }
      return total;
    }
    case TypeKind::Option: return sat_add(1, domain_size(t.elem(), cap), cap);
    case TypeKind::Pair:
      return sat_mul(domain_size(t.args.at(0), cap), domain_size(t.args.at(1), cap), cap);
    case TypeKind::Map: {
      auto per_key = sat_add(1, domain_size(t.elem(), cap), cap);
      std::uint64_t total = 1;
      for (std::uint32_t k = 0; k < t.bound; ++k) total = sat_mul(total, per_key, cap);
      return total;
    }
  }
  return cap;
}

std::vector<Value> enumerate_domain(const Type& t) {
  std::vector<Value> out;
  switch (t.kind) {
    case TypeKind::Bool:
      out = {Value::boolean(false), Value::boolean(true)};
      break;
    case TypeKind::Nat:
      for (std::uint32_t i = 0; i < t.bound; ++i) out.push_back(Value::nat(i));
      break;
    case TypeKind::Set:
      if (t.bound >= 63) throw UnboundedDomain("set domain too large: " + t.str());
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << t.bound); ++b)
        out.push_back(Value::set(b));
      break;
    case TypeKind::Stack: {
      if (t.max_len == 0) throw UnboundedDomain("stack without maximum length: " + t.str());
      auto elems = enumerate_domain(t.elem());
      std::vector<std::vector<Value>> layer{{}};
      out.push_back(Value::stack({}));
      for (std::uint32_t len = 1; len <= t.max_len; ++len) {
        std::vector<std::vector<Value>> next;
        for (const auto& prefix : layer) {
          for (const auto& e : elems) {
            auto s = prefix;
            s.push_back(e);
            out.push_back(Value::stack(s));
            next.push_back(std::move(s));
          }
        }
        layer = std::move(next);
      }
      break;
    }
    case TypeKind::Option:
      out.push_back(Value::none());
      for (auto& v : enumerate_domain(t.elem())) out.push_back(Value::some(std::move(v)));
      break;
    case TypeKind::Pair: {
      auto as = enumerate_domain(t.args.at(0));
      auto bs = enumerate_domain(t.args.at(1));
      for (const auto& a : as)
        for (const auto& b : bs) out.push_back(Value::pair(a, b));
      break;
    }
    case TypeKind::Map: {
      auto payloads = enumerate_domain(Type::option(t.elem()));
      out.push_back(Value::map({}));
      for (std::uint32_t k = 0; k < t.bound; ++k) {
        std::vector<Value> next;
        for (const auto& m : out)
          for (const auto& p : payloads) next.push_back(m.map_set(k, p));
        out = std::move(next);
      }
      break;
    }
  }
  return out;
}

}  // namespace og
