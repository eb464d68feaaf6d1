#include "scooprr/kernel.hpp"

#include <algorithm>

#include "scooprr/fault.hpp"

namespace scooprr {

const char* outcome_name(RunOutcomeKind k) {
  return k == RunOutcomeKind::Terminated ? "terminated" : "deadlocked";
}

int64_t as_int(const Value& v) {
  if (const auto* n = std::get_if<int64_t>(&v)) return *n;
  raise(FaultCode::Internal, "expected an integer, got " + value_str(v));
}

bool as_bool(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  raise(FaultCode::Internal, "expected a boolean, got " + value_str(v));
}

const ProcessorId& as_pid(const Value& v) {
  if (const auto* p = std::get_if<ProcessorId>(&v)) return *p;
  raise(FaultCode::Internal, "expected a handler reference, got " + value_str(v));
}

const IntList& as_list(const Value& v) {
  if (const auto* xs = std::get_if<IntList>(&v)) return *xs;
  raise(FaultCode::Internal, "expected an integer list, got " + value_str(v));
}

Value Locals::force(const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) raise(FaultCode::Internal, "unknown local '" + name + "'");
  if (const Value* v = std::get_if<Value>(&it->second)) return *v;
  const SlotRef& slot = std::get<SlotRef>(it->second);
  if (!slot->value) throw NeedFuture{slot};
  return *slot->value;
}

namespace {

Value eval_expr(const ObjectState& obj, const Locals& locals, const ArgExpr& e) {
  switch (e.kind) {
    case ArgExpr::Kind::Literal:
      return e.literal;
    case ArgExpr::Kind::Local:
      return locals.force(e.name);
    case ArgExpr::Kind::Field: {
      auto it = obj.find(e.name);
      if (it == obj.end())
        raise(FaultCode::Internal, "unknown field '" + e.name + "'");
      return it->second;
    }
  }
  raise(FaultCode::Internal, "bad expression kind");
}

IntList& list_field(ObjectState& obj, const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end())
    raise(FaultCode::Internal, "unknown field '" + field + "'");
  if (auto* xs = std::get_if<IntList>(&it->second)) return *xs;
  raise(FaultCode::Internal, "field '" + field + "' is not a list");
}

// Ops run in order against the step's working copies; the caller commits the
// copies only when every op succeeded, so a step that trips over an unfilled
// future leaves no trace and can be retried.
void apply_op(ObjectState& obj, Locals& locals, const ComputeOp& op) {
  if (const auto* s = std::get_if<OpSetLocal>(&op)) {
    Value v = eval_expr(obj, locals, s->value);
    if (s->delta != 0) v = as_int(v) + s->delta;
    locals.set(s->local, std::move(v));
  } else if (const auto* s = std::get_if<OpSetField>(&op)) {
    if (!obj.count(s->field))
      raise(FaultCode::Internal, "unknown field '" + s->field + "'");
    Value v = eval_expr(obj, locals, s->value);
    if (s->delta != 0) v = as_int(v) + s->delta;
    obj[s->field] = std::move(v);
  } else if (const auto* s = std::get_if<OpListAppend>(&op)) {
    int64_t v = as_int(eval_expr(obj, locals, s->value));
    list_field(obj, s->field).push_back(v);
  } else if (const auto* s = std::get_if<OpListSet>(&op)) {
    int64_t idx = as_int(eval_expr(obj, locals, s->index));
    int64_t v = as_int(eval_expr(obj, locals, s->value));
    IntList& xs = list_field(obj, s->field);
    if (idx < 0 || static_cast<size_t>(idx) >= xs.size())
      raise(FaultCode::Internal, "list index " + std::to_string(idx) +
                                     " out of range for '" + s->field + "'");
    xs[static_cast<size_t>(idx)] = v;
  } else {
    const auto& pop = std::get<OpListPopFront>(op);
    IntList& xs = list_field(obj, pop.field);
    if (xs.empty())
      raise(FaultCode::Internal, "pop from empty list '" + pop.field + "'");
    locals.set(pop.into, xs.front());
    xs.erase(xs.begin());
  }
}

}  // namespace

Kernel::Kernel(const Scenario& scenario, SchedulePolicy& policy)
    : scenario_(scenario), policy_(policy), arbiter_(*this, policy_) {
  std::string problem = scenario_validate(scenario_);
  if (!problem.empty())
    raise(FaultCode::Internal, "invalid scenario: " + problem);
  arbiter_.set_approval_hook(
      [this](const LockingRequest& req) { on_approval(req); });
}

std::optional<ProcessorId> Kernel::locked_by(const ProcessorId& p) const {
  return cproc(p).locked_by;
}

const ObjectState& Kernel::object_of(const ProcessorId& p) const {
  return cproc(p).object;
}

Kernel::Processor& Kernel::proc(const ProcessorId& p) {
  auto it = procs_.find(p);
  if (it == procs_.end()) raise(FaultCode::UnknownProcessor, p.str());
  return it->second;
}

const Kernel::Processor& Kernel::cproc(const ProcessorId& p) const {
  auto it = procs_.find(p);
  if (it == procs_.end()) raise(FaultCode::UnknownProcessor, p.str());
  return it->second;
}

const Routine& Kernel::resolve(const Processor& p,
                               const std::string& feature) const {
  if (!p.cls)
    raise(FaultCode::NoSuchFeature,
          p.id.str() + " has no feature table (created without a class)");
  auto it = p.cls->routines.find(feature);
  if (it == p.cls->routines.end())
    raise(FaultCode::NoSuchFeature, p.cls->name + "." + feature);
  return it->second;
}

void Kernel::bootstrap() {
  if (bootstrapped_) return;
  bootstrapped_ = true;
  const ClassDef& cls = scenario_.classes.at(scenario_.root_class);
  Processor root;
  root.id = ProcessorId::root();
  root.cls = &cls;
  root.object = cls.fields;
  procs_.emplace(root.id, std::move(root));
  if (observer_) observer_->on_created(ProcessorId::root());
  // The initial start needs no locking request: push the frame directly.
  begin_routine(proc(ProcessorId::root()),
                cls.routines.at(scenario_.root_routine), {}, nullptr, "", {});
}

ProcessorId Kernel::create_processor(const ProcessorId& creator,
                                     const ObjectState& object_template) {
  return create_impl(proc(creator), nullptr, object_template);
}

ProcessorId Kernel::create_impl(Processor& creator, const ClassDef* cls,
                                ObjectState object) {
  creator.creations += 1;
  ProcessorId id = creator.id.child(creator.creations);
  Processor np;
  np.id = id;
  np.cls = cls;
  np.object = std::move(object);
  procs_.emplace(id, std::move(np));
  if (observer_) observer_->on_created(id);
  return id;
}

SlotRef Kernel::enqueue_separate_call(const ProcessorId& client,
                                      const ProcessorId& supplier,
                                      const std::string& feature,
                                      std::vector<Value> args,
                                      bool wants_result) {
  proc(client);
  Processor& sp = proc(supplier);
  if (!sp.locked_by || *sp.locked_by != client) {
    raise(FaultCode::UncontrolledSeparateCall,
          client.str() + " calls " + supplier.str() + "." + feature +
              " without holding its lock");
  }
  FeatureRequest req;
  req.kind = wants_result ? FeatureRequest::Kind::Query
                          : FeatureRequest::Kind::Command;
  req.feature = feature;
  req.args = std::move(args);
  req.client = client;
  req.tag = sp.enqueue_tags++;
  SlotRef slot;
  if (wants_result) {
    slot = std::make_shared<Slot>();
    slot->supplier = supplier;
    req.reply = slot;
  }
  if (observer_) observer_->on_enqueued(supplier, req);
  sp.queue.push_back(std::move(req));
  return slot;
}

void Kernel::enqueue(Processor& supplier, FeatureRequest req) {
  req.tag = supplier.enqueue_tags++;
  if (observer_) observer_->on_enqueued(supplier.id, req);
  supplier.queue.push_back(std::move(req));
}

void Kernel::emit_unlock_markers(Processor& p,
                                 const std::vector<ProcessorId>& targets) {
  for (const ProcessorId& t : targets) {
    FeatureRequest marker;
    marker.kind = FeatureRequest::Kind::Unlock;
    marker.client = p.id;
    enqueue(proc(t), std::move(marker));
  }
}

void Kernel::issue_unlock_requests(const ProcessorId& holder) {
  Processor& hp = proc(holder);
  for (auto& [id, p] : procs_) {
    if (p.locked_by && *p.locked_by == holder) {
      FeatureRequest marker;
      marker.kind = FeatureRequest::Kind::Unlock;
      marker.client = holder;
      enqueue(p, std::move(marker));
    }
  }
  (void)hp;
}

std::optional<Value> Kernel::execute_non_separate(const ProcessorId& processor,
                                                  const std::string& feature,
                                                  std::vector<Value> args) {
  Processor& p = proc(processor);
  const Routine& r = resolve(p, feature);
  if (!r.controlled.empty() || !r.wait.empty()) {
    raise(FaultCode::Internal,
          "feature '" + feature +
              "' needs synchronization; drive it through the run loop");
  }
  SlotRef slot;
  if (r.result) {
    slot = std::make_shared<Slot>();
    slot->supplier = processor;
  }
  const size_t base_depth = p.stack.size();
  begin_routine(p, r, std::move(args), slot, "", {});
  while (p.stack.size() > base_depth) {
    if (!micro_step(p))
      raise(FaultCode::Internal,
            "non-separate call blocked inside '" + feature + "'");
  }
  if (!slot) return std::nullopt;
  if (!slot->value)
    raise(FaultCode::Internal, "query '" + feature + "' produced no result");
  return slot->value;
}

Value Kernel::await_result(const ProcessorId& client, const SlotRef& slot) {
  proc(client);
  if (!slot) raise(FaultCode::Internal, "awaiting a null slot");
  while (!slot->value) {
    const bool moved = step_all();
    if (slot->value) break;
    Arbiter::RoundResult r = arbiter_.schedule_round();
    if (r.approved) {
      count_step();
      continue;
    }
    if (!moved)
      raise(FaultCode::LostResult,
            "supplier " + slot->supplier.str() + " quiesced without filling the slot");
  }
  return *slot->value;
}

void Kernel::count_step() {
  steps_ += 1;
  if (steps_ > budget_)
    raise(FaultCode::BudgetExhausted,
          "exceeded " + std::to_string(budget_) + " kernel steps");
}

bool Kernel::step_all() {
  bool any = false;
  bool moved = true;
  while (moved) {
    moved = false;
    for (auto& [id, p] : procs_) {
      if (micro_step(p)) {
        moved = true;
        any = true;
      }
    }
  }
  return any;
}

bool Kernel::micro_step(Processor& p) {
  switch (p.status) {
    case ProcStatus::Done:
    case ProcStatus::BlockedOnLock:
      return false;
    case ProcStatus::BlockedOnFuture:
      if (!p.awaited || !p.awaited->value) return false;
      p.awaited = nullptr;
      p.status = ProcStatus::Running;
      break;  // retry the stuck step below
    default:
      break;
  }
  try {
    if (!p.stack.empty()) {
      p.status = ProcStatus::Running;
      const bool progressed = advance_frame(p);
      if (progressed) count_step();
      return progressed;
    }
    if (!p.queue.empty()) {
      const bool progressed = dequeue_next(p);
      if (progressed) count_step();
      return progressed;
    }
    p.status = ProcStatus::Idle;
    return false;
  } catch (const NeedFuture& nf) {
    p.status = ProcStatus::BlockedOnFuture;
    p.awaited = nf.slot;
    count_step();
    return true;  // the transition happens once per fill; no livelock
  }
}

bool Kernel::advance_frame(Processor& p) {
  Frame& f = p.stack.back();
  if (f.cursors.empty()) {
    finish_frame(p);
    return true;
  }
  BodyCursor& cur = f.cursors.back();
  if (cur.next >= cur.body->size()) {
    finish_cursor(p);
    return true;
  }
  exec_step(p, (*cur.body)[cur.next]);
  return true;
}

bool Kernel::dequeue_next(Processor& p) {
  FeatureRequest req = std::move(p.queue.front());
  p.queue.pop_front();

  if (req.kind == FeatureRequest::Kind::Unlock) {
    if (!p.locked_by || *p.locked_by != req.client) {
      raise(FaultCode::Internal,
            "unlock marker from " + req.client.str() + " but " + p.id.str() +
                " is not locked by it");
    }
    p.locked_by.reset();
    if (observer_) observer_->on_applied(p.id, req);
    return true;
  }

  const Routine& r = resolve(p, req.feature);
  if (r.params.size() != req.args.size())
    raise(FaultCode::Internal, "arity mismatch applying '" + req.feature + "'");
  if (req.reply && !r.result)
    raise(FaultCode::Internal,
          "separate query of command feature '" + req.feature + "'");

  // Every dequeued feature application performs one synchronization step:
  // its locking request carries the handlers of the controlled actuals —
  // possibly none, in which case the approval locks nothing but is still a
  // numbered critical event.
  std::vector<ProcessorId> declared;
  for (size_t idx : r.controlled) declared.push_back(as_pid(req.args[idx]));

  PendingStart st;
  st.what = PendingStart::What::Routine;
  st.routine = &r;
  st.reply = req.reply;
  st.origin = req;
  st.args = std::move(req.args);
  submit_sync(p, declared, r.wait, std::move(st));
  return true;
}

void Kernel::submit_sync(Processor& p, const std::vector<ProcessorId>& declared,
                         WaitCond wait, PendingStart start) {
  LockingRequest req;
  req.requester = p.id;
  req.wait_targets = declared;
  req.targets = declared;
  std::sort(req.targets.begin(), req.targets.end());
  req.targets.erase(std::unique(req.targets.begin(), req.targets.end()),
                    req.targets.end());
  for (const ProcessorId& t : req.targets) proc(t);  // must exist
  req.wait = std::move(wait);
  req.wait_name = wait_cond_name(req.wait);
  req.serial = p.next_serial++;
  p.pending_start = std::move(start);
  p.status = ProcStatus::BlockedOnLock;
  arbiter_.submit(std::move(req));
}

void Kernel::on_approval(const LockingRequest& req) {
  if (recorder_) recorder_->on_approved(req.requester);
  if (observer_) observer_->on_approved(req);
  for (const ProcessorId& t : req.targets) {
    Processor& tp = proc(t);
    if (tp.locked_by)
      raise(FaultCode::Internal, "approved a request on locked " + t.str());
    tp.locked_by = req.requester;
  }
  Processor& p = proc(req.requester);
  if (p.status != ProcStatus::BlockedOnLock || !p.pending_start)
    raise(FaultCode::Internal, "approval for a processor that is not waiting");
  p.status = ProcStatus::Running;
  start_pending(p, req.targets);
}

void Kernel::start_pending(Processor& p,
                           const std::vector<ProcessorId>& lock_targets) {
  PendingStart st = std::move(*p.pending_start);
  p.pending_start.reset();
  if (st.what == PendingStart::What::Routine) {
    if (st.origin && observer_) observer_->on_applied(p.id, *st.origin);
    begin_routine(p, *st.routine, std::move(st.args), std::move(st.reply),
                  std::move(st.bind_into_caller), lock_targets);
  } else {
    Frame& f = p.stack.back();
    f.cursors.push_back(BodyCursor{&st.block->body, 0, lock_targets});
  }
}

void Kernel::begin_routine(Processor& p, const Routine& routine,
                           std::vector<Value> args, SlotRef reply,
                           std::string bind_into_caller,
                           std::vector<ProcessorId> locks) {
  if (args.size() != routine.params.size())
    raise(FaultCode::Internal, "arity mismatch for '" + routine.name + "'");
  Frame f;
  f.routine = &routine;
  for (size_t i = 0; i < args.size(); ++i)
    f.locals.set(routine.params[i], std::move(args[i]));
  f.cursors.push_back(BodyCursor{&routine.body, 0, {}});
  f.reply = std::move(reply);
  f.bind_into_caller = std::move(bind_into_caller);
  f.unlock_on_exit = std::move(locks);
  p.stack.push_back(std::move(f));
  p.status = ProcStatus::Running;
}

void Kernel::finish_cursor(Processor& p) {
  Frame& f = p.stack.back();
  BodyCursor cur = std::move(f.cursors.back());
  f.cursors.pop_back();
  emit_unlock_markers(p, cur.unlock_on_exit);
}

void Kernel::finish_frame(Processor& p) {
  Frame& f = p.stack.back();
  std::optional<Value> result;
  if (f.routine && f.routine->result)
    result = eval_result(p, f, *f.routine->result);  // may throw NeedFuture

  if (f.reply) {
    if (!result)
      raise(FaultCode::Internal, "query frame finished without a result");
    if (f.reply->value)
      raise(FaultCode::Internal, "result slot filled twice");
    f.reply->value = *result;
  }
  std::vector<ProcessorId> unlocks = std::move(f.unlock_on_exit);
  std::string bind = std::move(f.bind_into_caller);
  p.stack.pop_back();
  emit_unlock_markers(p, unlocks);
  if (!bind.empty()) {
    if (p.stack.empty())
      raise(FaultCode::Internal, "result binding without a caller frame");
    if (!result)
      raise(FaultCode::Internal, "non-separate query produced no result");
    p.stack.back().locals.set(bind, *result);
  }
  if (p.stack.empty()) p.status = ProcStatus::Idle;
}

void Kernel::exec_step(Processor& p, const Step& step) {
  std::visit([&](const auto& s) { exec(p, s); }, step.v);
}

Kernel::Frame& Kernel::top_frame(Processor& p) {
  if (p.stack.empty()) raise(FaultCode::Internal, "no active frame");
  return p.stack.back();
}

Value Kernel::eval_arg(Processor& p, const ArgExpr& e) {
  return eval_expr(p.object, top_frame(p).locals, e);
}

std::vector<Value> Kernel::eval_args(Processor& p,
                                     const std::vector<ArgExpr>& es) {
  std::vector<Value> out;
  out.reserve(es.size());
  for (const ArgExpr& e : es) out.push_back(eval_arg(p, e));
  return out;
}

Value Kernel::eval_result(Processor& p, Frame& f, const ResultSpec& spec) {
  switch (spec.kind) {
    case ResultSpec::Kind::Local:
      return f.locals.force(spec.name);
    case ResultSpec::Kind::ListElemEq: {
      int64_t idx = as_int(eval_expr(p.object, f.locals, spec.index));
      auto it = p.object.find(spec.name);
      if (it == p.object.end())
        raise(FaultCode::Internal, "unknown field '" + spec.name + "'");
      const IntList& xs = as_list(it->second);
      if (idx < 0 || static_cast<size_t>(idx) >= xs.size())
        raise(FaultCode::Internal, "list index " + std::to_string(idx) +
                                       " out of range for '" + spec.name + "'");
      return Value{xs[static_cast<size_t>(idx)] == spec.constant};
    }
  }
  raise(FaultCode::Internal, "bad result kind");
}

void Kernel::exec(Processor& p, const ComputeStep& s) {
  Frame& f = top_frame(p);
  ObjectState obj = p.object;
  Locals locals = f.locals;
  for (const ComputeOp& op : s.ops) apply_op(obj, locals, op);
  p.object = std::move(obj);
  f.locals = std::move(locals);
  f.cursors.back().next += 1;
}

void Kernel::exec(Processor& p, const CallStep& s) {
  const ProcessorId t = as_pid(eval_arg(p, s.target));
  std::vector<Value> args = eval_args(p, s.args);
  if (t == p.id) {
    nonseparate_invoke(p, s.feature, std::move(args), "");
    return;
  }
  enqueue_separate_call(p.id, t, s.feature, std::move(args), false);
  top_frame(p).cursors.back().next += 1;
}

void Kernel::exec(Processor& p, const QueryStep& s) {
  const ProcessorId t = as_pid(eval_arg(p, s.target));
  std::vector<Value> args = eval_args(p, s.args);
  if (t == p.id) {
    nonseparate_invoke(p, s.feature, std::move(args), s.into);
    return;
  }
  SlotRef slot = enqueue_separate_call(p.id, t, s.feature, std::move(args), true);
  Frame& f = top_frame(p);
  f.locals.set_slot(s.into, std::move(slot));
  f.cursors.back().next += 1;
}

void Kernel::exec(Processor& p, const CreateStep& s) {
  ObjectState object = scenario_.classes.at(s.cls).fields;
  for (const auto& [field, expr] : s.field_init)
    object[field] = eval_arg(p, expr);
  const ClassDef* cls = &scenario_.classes.at(s.cls);
  ProcessorId child = create_impl(p, cls, std::move(object));
  Frame& f = top_frame(p);
  f.locals.set(s.into, Value{child});
  f.cursors.back().next += 1;
}

void Kernel::exec(Processor& p, const NonSeparateCallStep& s) {
  std::vector<Value> args = eval_args(p, s.args);
  nonseparate_invoke(p, s.feature, std::move(args), "");
}

void Kernel::exec(Processor& p, const SeparateBlockStep& s) {
  std::vector<ProcessorId> declared;
  declared.reserve(s.targets.size());
  for (const ArgExpr& e : s.targets) declared.push_back(as_pid(eval_arg(p, e)));
  top_frame(p).cursors.back().next += 1;
  PendingStart st;
  st.what = PendingStart::What::Block;
  st.block = &s;
  submit_sync(p, declared, s.wait, std::move(st));
}

void Kernel::exec(Processor& p, const BranchStep& s) {
  Frame& f = top_frame(p);
  const bool taken = as_bool(f.locals.force(s.condition_local));
  f.cursors.back().next += 1;
  const Body* body = taken ? &s.then_body : &s.else_body;
  f.cursors.push_back(BodyCursor{body, 0, {}});
}

void Kernel::nonseparate_invoke(Processor& p, const std::string& feature,
                                std::vector<Value> args, std::string bind_into) {
  const Routine& r = resolve(p, feature);
  if (r.params.size() != args.size())
    raise(FaultCode::Internal, "arity mismatch for '" + feature + "'");
  if (!bind_into.empty() && !r.result)
    raise(FaultCode::Internal,
          "binding the result of command feature '" + feature + "'");
  std::vector<ProcessorId> declared;
  for (size_t idx : r.controlled) declared.push_back(as_pid(args[idx]));
  top_frame(p).cursors.back().next += 1;
  if (declared.empty() && r.wait.empty()) {
    // Processed right away on the caller's stack; never a critical event.
    begin_routine(p, r, std::move(args), nullptr, std::move(bind_into), {});
    return;
  }
  PendingStart st;
  st.what = PendingStart::What::Routine;
  st.routine = &r;
  st.args = std::move(args);
  st.bind_into_caller = std::move(bind_into);
  submit_sync(p, declared, r.wait, std::move(st));
}

bool Kernel::terminated() const {
  if (!arbiter_.pending().empty()) return false;
  for (const auto& [id, p] : procs_) {
    if (!p.stack.empty() || !p.queue.empty()) return false;
  }
  return true;
}

RunOutcomeKind Kernel::finish_run(RunOutcomeKind kind) {
  if (recorder_) recorder_->on_terminate();
  if (kind == RunOutcomeKind::Terminated) {
    for (auto& [id, p] : procs_) p.status = ProcStatus::Done;
  }
  return kind;
}

RunOutcomeKind Kernel::run_until_quiescent() {
  bootstrap();
  while (true) {
    step_all();
    if (terminated()) return finish_run(RunOutcomeKind::Terminated);
    Arbiter::RoundResult r = arbiter_.schedule_round();
    if (r.approved) {
      count_step();
      continue;
    }
    if (r.gate_refused) {
      raise(FaultCode::ReplayDivergence,
            "the schedule gate rejects every request the program offers");
    }
    if (!arbiter_.pending().empty())
      return finish_run(RunOutcomeKind::Deadlocked);
    raise(FaultCode::LostResult, "blocked on a future no supplier will fill");
  }
}

std::vector<ProcessorId> Kernel::processor_ids() const {
  std::vector<ProcessorId> out;
  out.reserve(procs_.size());
  for (const auto& [id, p] : procs_) out.push_back(id);
  return out;
}

ProcStatus Kernel::status_of(const ProcessorId& p) const {
  return cproc(p).status;
}

size_t Kernel::call_depth(const ProcessorId& p) const {
  return cproc(p).stack.size();
}

const std::deque<FeatureRequest>& Kernel::queue_of(const ProcessorId& p) const {
  return cproc(p).queue;
}

std::map<ProcessorId, ObjectState> Kernel::object_snapshot() const {
  std::map<ProcessorId, ObjectState> out;
  for (const auto& [id, p] : procs_) out.emplace(id, p.object);
  return out;
}

}  // namespace scooprr
