#include "og/system.hpp"

#include <set>
#include <sstream>

#include "og/digest.hpp"
#include "og/hw.hpp"

namespace og {

const char* to_string(HwVariant v) { return v == HwVariant::Arm ? "arm" : "generic"; }
const char* to_string(EventsMode m) { return m == EventsMode::AddOne ? "add-one" : "any-superset"; }
const char* to_string(SyscallWait w) {
  return w == SyscallWait::WaitUntilClear ? "clear" : "literal";
}

std::map<RoutineId, std::uint32_t> default_priority(const SystemConfig& cfg) {
  std::map<RoutineId, std::uint32_t> p{{SVC_s, 0}, {SVC_a, 0}};
  for (std::uint32_t k = 0; k < cfg.nb_ints; ++k) p[user0 + cfg.nb_users + k] = 1 + k;
  return p;
}

std::map<RoutineId, std::uint32_t> default_user_priority(const SystemConfig& cfg) {
  std::map<RoutineId, std::uint32_t> p;
  for (std::uint32_t j = 0; j < cfg.nb_users; ++j) p[user0 + j] = cfg.nb_users - j;
  return p;
}

std::map<std::uint32_t, RoutineId> default_event_task(const SystemConfig& cfg) {
  std::map<std::uint32_t, RoutineId> m;
  for (std::uint32_t e = 0; e < cfg.nb_events; ++e) m[e] = user0 + (e % cfg.nb_users);
  return m;
}

void SystemConfig::fill_defaults() {
  if (priority.empty()) priority = default_priority(*this);
  if (user_priority.empty()) user_priority = default_user_priority(*this);
  if (event_task.empty() && nb_users > 0) event_task = default_event_task(*this);
}

void SystemConfig::validate() const {
  if (nb_users < 1) throw ConfigError("users must be at least 1");
  if (routine_count() > 60) throw ConfigError("at most 60 routines are supported");
  if (nb_events > 60) throw ConfigError("at most 60 events are supported");
  if (events_mode == EventsMode::AnySuperset && nb_events > 12)
    throw ConfigError("any-superset event changes support at most 12 events");
  for (auto [r, p] : priority)
    if (r >= routine_count() || (r >= user0 && r < user0 + nb_users))
      throw ConfigError("priority given for non-interrupt routine " + std::to_string(r));
  for (auto [r, p] : user_priority)
    if (r < user0 || r >= user0 + nb_users)
      throw ConfigError("user_priority given for non-user routine " + std::to_string(r));
  for (auto [e, r] : event_task) {
    if (e >= nb_events) throw ConfigError("event_task for unknown event " + std::to_string(e));
    if (r < user0 || r >= user0 + nb_users)
      throw ConfigError("EventMapsToNonUser: event " + std::to_string(e) + " maps to routine " +
                        std::to_string(r));
  }
}

void declare_hw_vars(VarTable& vars, GlobalState& init, const SystemConfig& cfg) {
  auto rc = cfg.routine_count();
  auto routine = Type::nat(rc);
  vars.declare("AT", routine);
  vars.declare("ATStack", Type::stack(routine, rc));
  vars.declare("EIT", Type::set(rc));
  vars.declare("SVCaReq", Type::boolean());
  std::uint64_t eit = std::uint64_t{1} << SVC_a;
  for (RoutineId r = user0 + cfg.nb_users; r < rc; ++r) eit |= std::uint64_t{1} << r;
  init.values.push_back(Value::nat(user0));
  init.values.push_back(Value::stack({}));
  init.values.push_back(Value::set(eit));
  init.values.push_back(Value::boolean(false));
  if (cfg.variant == HwVariant::Generic) {
    vars.declare("EITStack", Type::stack(Type::set(rc), rc));
    init.values.push_back(Value::stack({}));
  }
}

void System::finalize() {
  ctx = make_context(config);
  graphs.clear();
  std::set<std::string> names;
  for (const auto& t : tasks) {
    if (!names.insert(t.name).second) throw ConfigError("duplicate task name " + t.name);
    graphs.push_back(compile(t.body));
  }
}

std::optional<std::size_t> System::task_index(const std::string& n) const {
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].name == n) return i;
  return std::nullopt;
}

std::string System::canonical() const {
  std::ostringstream os;
  os << "system " << name << '\n';
  os << "users " << config.nb_users << " interrupts " << config.nb_ints << " events "
     << config.nb_events << " variant " << to_string(config.variant) << " events_mode "
     << to_string(config.events_mode) << " syscall_wait " << to_string(config.syscall_wait)
     << " sched_order " << (config.sched_order == SchedOrder::Max ? "max" : "min") << '\n';
  os << "priority";
  for (auto [r, p] : config.priority) os << ' ' << r << ':' << p;
  os << "\nuser_priority";
  for (auto [r, p] : config.user_priority) os << ' ' << r << ':' << p;
  os << "\nevent_task";
  for (auto [e, r] : config.event_task) os << ' ' << e << ':' << r;
  os << '\n';
  for (const auto& d : vars.decls()) os << "var " << d.name << " : " << d.type.str() << '\n';
  os << "init " << init.render(vars) << '\n';
  for (const auto& t : tasks)
    os << "task " << t.name << " as " << t.owner << (t.controlled ? " controlled " : " ")
       << render_command(t.body) << '\n';
  return os.str();
}

std::string System::config_digest() const { return digest_hex(canonical()); }

}  // namespace og
