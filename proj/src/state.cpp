#include "og/state.hpp"

#include <stdexcept>

namespace og {

VarId VarTable::declare(std::string name, Type type) {
  if (find(name)) throw std::invalid_argument("variable declared twice: " + name);
  decls_.push_back(VarDecl{std::move(name), std::move(type)});
  return static_cast<VarId>(decls_.size() - 1);
}

std::optional<VarId> VarTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < decls_.size(); ++i)
    if (decls_[i].name == name) return static_cast<VarId>(i);
  return std::nullopt;
}

VarId VarTable::at(std::string_view name) const {
  auto id = find(name);
  if (!id) throw std::out_of_range("unknown variable " + std::string(name));
  return *id;
}

bool VarTable::operator==(const VarTable& o) const { return decls_ == o.decls_; }

bool operator==(const VarDecl& a, const VarDecl& b) {
  return a.name == b.name && a.type == b.type;
}

std::size_t GlobalState::hash() const {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& v : values) h = (h ^ v.hash()) * 0x100000001b3ULL;
  return h;
}

void GlobalState::encode(std::string& out) const {
  for (const auto& v : values) v.encode(out);
}

GlobalState GlobalState::decode(std::string_view in, std::size_t& pos, std::size_t nvars) {
  GlobalState s;
  s.values.reserve(nvars);
  for (std::size_t i = 0; i < nvars; ++i) s.values.push_back(Value::decode(in, pos));
  return s;
}

std::string GlobalState::render(const VarTable& vars) const {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += i < vars.size() ? vars[static_cast<VarId>(i)].name : "v" + std::to_string(i);
    out += '=';
    out += values[i].str();
  }
  return out;
}

std::uint64_t Context::users_mask() const {
  std::uint64_t m = 0;
  for (RoutineId r = user0; r < user0 + nb_users; ++r) m |= std::uint64_t{1} << r;
  return m;
}

std::uint64_t Context::interrupts_mask() const {
  std::uint64_t m = 0;
  for (RoutineId r = user0 + nb_users; r < routine_count(); ++r) m |= std::uint64_t{1} << r;
  return m;
}

}  // namespace og
