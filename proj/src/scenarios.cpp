#include "scooprr/scenarios.hpp"

#include <algorithm>

#include "scooprr/fault.hpp"

namespace scooprr {

namespace {

constexpr int64_t kSoftwareIssuer = 0;
constexpr int64_t kFirstBackup = 1;
constexpr int64_t kSecondBackup = 2;
constexpr int64_t kIssuerCount = 3;

Step step(ComputeStep s) { return Step{std::move(s)}; }
Step step(CallStep s) { return Step{std::move(s)}; }
Step step(QueryStep s) { return Step{std::move(s)}; }
Step step(CreateStep s) { return Step{std::move(s)}; }
Step step(NonSeparateCallStep s) { return Step{std::move(s)}; }
Step step(SeparateBlockStep s) { return Step{std::move(s)}; }
Step step(BranchStep s) { return Step{std::move(s)}; }

// A trading venue. owners[i] is the id of whoever bought issuer i (-1 while
// unsold); purchases logs issuer ids in sale order.
ClassDef market_class() {
  ClassDef market;
  market.name = "market";
  market.fields["owners"] = Value{IntList(kIssuerCount, -1)};
  market.fields["purchases"] = Value{IntList{}};

  Routine buy;
  buy.name = "buy";
  buy.params = {"buyer", "issuer"};
  buy.body.push_back(step(ComputeStep{{
      ComputeOp{OpListSet{"owners", arg_local("issuer"), arg_local("buyer")}},
      ComputeOp{OpListAppend{"purchases", arg_local("issuer")}},
  }}));
  market.routines["buy"] = std::move(buy);

  Routine available;
  available.name = "available";
  available.params = {"issuer"};
  available.result =
      ResultSpec{ResultSpec::Kind::ListElemEq, "owners", arg_local("issuer"), -1};
  market.routines["available"] = std::move(available);

  return market;
}

// Buys at a market it has locked. buy_alternative keeps its primary market
// locked while it checks availability there and, when the issuer is still
// unsold, reaches out for the other market — the second lock that can corner
// two investors against each other.
ClassDef investor_class() {
  ClassDef investor;
  investor.name = "investor";
  investor.fields["id"] = Value{int64_t{0}};

  Routine buy;
  buy.name = "buy";
  buy.params = {"m", "issuer"};
  buy.controlled = {0};
  buy.body.push_back(step(CallStep{
      arg_local("m"), "buy", {arg_field("id"), arg_local("issuer")}}));
  investor.routines["buy"] = std::move(buy);

  Routine alt;
  alt.name = "buy_alternative";
  alt.params = {"own", "other", "issuer"};
  alt.controlled = {0};
  alt.body.push_back(step(QueryStep{
      arg_local("own"), "available", {arg_local("issuer")}, "unsold"}));
  BranchStep when_unsold;
  when_unsold.condition_local = "unsold";
  {
    SeparateBlockStep cross;
    cross.targets = {arg_local("other")};
    cross.body.push_back(step(CallStep{
        arg_local("other"), "buy", {arg_field("id"), arg_local("issuer")}}));
    when_unsold.then_body.push_back(step(std::move(cross)));
  }
  alt.body.push_back(step(std::move(when_unsold)));
  investor.routines["buy_alternative"] = std::move(alt);

  return investor;
}

}  // namespace

Scenario scenario_market_deadlock() {
  Scenario sc;
  sc.name = "market";
  sc.parameters = {{"software_issuer", kSoftwareIssuer},
                   {"first_backup", kFirstBackup},
                   {"second_backup", kSecondBackup},
                   {"issuer_count", kIssuerCount}};
  sc.classes["market"] = market_class();
  sc.classes["investor"] = investor_class();

  ClassDef app;
  app.name = "application";

  Routine trans;
  trans.name = "do_transaction";
  trans.params = {"i1", "i2", "m1", "m2"};
  trans.controlled = {0, 1, 2, 3};
  trans.body.push_back(step(CallStep{
      arg_local("i1"), "buy", {arg_local("m1"), arg_lit(kSoftwareIssuer)}}));
  trans.body.push_back(step(CallStep{
      arg_local("i2"), "buy", {arg_local("m2"), arg_lit(kSoftwareIssuer)}}));
  trans.body.push_back(step(CallStep{
      arg_local("i1"), "buy_alternative",
      {arg_local("m1"), arg_local("m2"), arg_lit(kFirstBackup)}}));
  trans.body.push_back(step(CallStep{
      arg_local("i2"), "buy_alternative",
      {arg_local("m2"), arg_local("m1"), arg_lit(kSecondBackup)}}));
  app.routines["do_transaction"] = std::move(trans);

  Routine make;
  make.name = "make";
  make.body.push_back(step(CreateStep{
      "investor", "first", {{"id", arg_lit(int64_t{1})}}}));
  make.body.push_back(step(CreateStep{
      "investor", "second", {{"id", arg_lit(int64_t{2})}}}));
  make.body.push_back(step(CreateStep{"market", "zurich", {}}));
  make.body.push_back(step(CreateStep{"market", "new_york", {}}));
  make.body.push_back(step(NonSeparateCallStep{
      "do_transaction",
      {arg_local("first"), arg_local("second"), arg_local("zurich"),
       arg_local("new_york")}}));
  app.routines["make"] = std::move(make);

  sc.classes["application"] = std::move(app);
  sc.root_class = "application";
  sc.root_routine = "make";
  return sc;
}

Scenario scenario_producer_consumer_counts(int64_t produce, int64_t consume) {
  if (produce < 0 || consume < 0)
    raise(FaultCode::Internal, "negative item count");

  Scenario sc;
  sc.name = "producer-consumer";
  sc.parameters = {{"items", produce}, {"consumes", consume}};

  ClassDef buffer;
  buffer.name = "buffer";
  buffer.fields["items"] = Value{IntList{}};
  buffer.fields["count"] = Value{int64_t{0}};
  {
    Routine put;
    put.name = "put";
    put.params = {"x"};
    put.body.push_back(step(ComputeStep{{
        ComputeOp{OpListAppend{"items", arg_local("x")}},
        ComputeOp{OpSetField{"count", arg_field("count"), 1}},
    }}));
    buffer.routines["put"] = std::move(put);

    Routine item;
    item.name = "item";
    item.body.push_back(step(ComputeStep{{
        ComputeOp{OpListPopFront{"items", "head"}},
        ComputeOp{OpSetField{"count", arg_field("count"), -1}},
    }}));
    item.result = ResultSpec{ResultSpec::Kind::Local, "head", {}, 0};
    buffer.routines["item"] = std::move(item);
  }
  sc.classes["buffer"] = std::move(buffer);

  ClassDef producer;
  producer.name = "producer";
  {
    // One locking step per item: lock the buffer, put, unlock.
    Routine run;
    run.name = "produce";
    run.params = {"buf"};
    for (int64_t i = 0; i < produce; ++i) {
      SeparateBlockStep block;
      block.targets = {arg_local("buf")};
      block.body.push_back(
          step(CallStep{arg_local("buf"), "put", {arg_lit(i)}}));
      run.body.push_back(step(std::move(block)));
    }
    producer.routines["produce"] = std::move(run);
  }
  sc.classes["producer"] = std::move(producer);

  ClassDef consumer;
  consumer.name = "consumer";
  consumer.fields["consumed"] = Value{IntList{}};
  {
    // Each round waits until the buffer holds something, takes the oldest
    // item, and logs it.
    Routine run;
    run.name = "consume_all";
    run.params = {"buf"};
    for (int64_t i = 0; i < consume; ++i) {
      SeparateBlockStep block;
      block.targets = {arg_local("buf")};
      block.wait = {WaitAtom{0, "count", false, 0}};
      block.body.push_back(
          step(QueryStep{arg_local("buf"), "item", {}, "x"}));
      block.body.push_back(step(ComputeStep{{
          ComputeOp{OpListAppend{"consumed", arg_local("x")}},
      }}));
      run.body.push_back(step(std::move(block)));
    }
    consumer.routines["consume_all"] = std::move(run);
  }
  sc.classes["consumer"] = std::move(consumer);

  ClassDef app;
  app.name = "application";
  {
    Routine make;
    make.name = "make";
    make.body.push_back(step(CreateStep{"buffer", "buf", {}}));
    make.body.push_back(step(CreateStep{"producer", "prod", {}}));
    make.body.push_back(step(CreateStep{"consumer", "cons", {}}));
    {
      SeparateBlockStep start_prod;
      start_prod.targets = {arg_local("prod")};
      start_prod.body.push_back(
          step(CallStep{arg_local("prod"), "produce", {arg_local("buf")}}));
      make.body.push_back(step(std::move(start_prod)));
    }
    {
      SeparateBlockStep start_cons;
      start_cons.targets = {arg_local("cons")};
      start_cons.body.push_back(step(
          CallStep{arg_local("cons"), "consume_all", {arg_local("buf")}}));
      make.body.push_back(step(std::move(start_cons)));
    }
    app.routines["make"] = std::move(make);
  }
  sc.classes["application"] = std::move(app);

  sc.root_class = "application";
  sc.root_routine = "make";
  return sc;
}

Scenario scenario_producer_consumer(int64_t items) {
  return scenario_producer_consumer_counts(items, items);
}

namespace {

// Shared skeleton of the two transaction variants: two investors, one market,
// consecutive issuers. The variants differ only in where the issuer
// arithmetic sits relative to the two calls.
Scenario fig1_base(bool compute_early) {
  Scenario sc;
  sc.name = "fig1";
  sc.parameters = {{"first_issuer", kFirstBackup},
                   {"issuer_count", kIssuerCount}};
  sc.classes["market"] = market_class();

  ClassDef investor;
  investor.name = "investor";
  investor.fields["id"] = Value{int64_t{0}};
  {
    Routine buy;
    buy.name = "buy";
    buy.params = {"m", "issuer"};
    buy.controlled = {0};
    buy.body.push_back(step(CallStep{
        arg_local("m"), "buy", {arg_field("id"), arg_local("issuer")}}));
    investor.routines["buy"] = std::move(buy);
  }
  sc.classes["investor"] = std::move(investor);

  ClassDef app;
  app.name = "application";
  {
    Routine trans;
    trans.name = "do_transaction";
    trans.params = {"i1", "i2", "m"};
    trans.controlled = {0, 1, 2};
    Step first_issue = step(ComputeStep{
        {ComputeOp{OpSetLocal{"issue", arg_lit(kFirstBackup), 0}}}});
    Step next_issue = step(ComputeStep{
        {ComputeOp{OpSetLocal{"next", arg_local("issue"), 1}}}});
    Step buy_first = step(CallStep{
        arg_local("i1"), "buy", {arg_local("m"), arg_local("issue")}});
    if (compute_early) {
      trans.body.push_back(std::move(first_issue));
      trans.body.push_back(std::move(next_issue));
      trans.body.push_back(std::move(buy_first));
      trans.body.push_back(step(CallStep{
          arg_local("i2"), "buy", {arg_local("m"), arg_local("next")}}));
    } else {
      trans.body.push_back(std::move(first_issue));
      trans.body.push_back(std::move(buy_first));
      trans.body.push_back(step(ComputeStep{
          {ComputeOp{OpSetLocal{"issue", arg_local("issue"), 1}}}}));
      trans.body.push_back(step(CallStep{
          arg_local("i2"), "buy", {arg_local("m"), arg_local("issue")}}));
    }
    app.routines["do_transaction"] = std::move(trans);

    Routine make;
    make.name = "make";
    make.body.push_back(step(CreateStep{
        "investor", "first", {{"id", arg_lit(int64_t{1})}}}));
    make.body.push_back(step(CreateStep{
        "investor", "second", {{"id", arg_lit(int64_t{2})}}}));
    make.body.push_back(step(CreateStep{"market", "mkt", {}}));
    make.body.push_back(step(NonSeparateCallStep{
        "do_transaction",
        {arg_local("first"), arg_local("second"), arg_local("mkt")}}));
    app.routines["make"] = std::move(make);
  }
  sc.classes["application"] = std::move(app);

  sc.root_class = "application";
  sc.root_routine = "make";
  return sc;
}

}  // namespace

Scenario scenario_fig1_transaction() { return fig1_base(false); }

Scenario scenario_fig1_transaction_compute_early() { return fig1_base(true); }

std::vector<std::string> scenario_names() {
  return {"fig1", "market", "producer-consumer"};
}

Scenario make_scenario(const std::string& name,
                       const std::map<std::string, int64_t>& overrides) {
  auto get = [&](const std::string& key, int64_t fallback) {
    auto it = overrides.find(key);
    return it == overrides.end() ? fallback : it->second;
  };
  auto reject_unknown = [&](std::initializer_list<const char*> known) {
    for (const auto& [key, value] : overrides) {
      if (std::find_if(known.begin(), known.end(), [&](const char* k) {
            return key == k;
          }) == known.end()) {
        raise(FaultCode::Internal,
              "scenario '" + name + "' has no parameter '" + key + "'");
      }
    }
  };

  if (name == "fig1") {
    reject_unknown({});
    return scenario_fig1_transaction();
  }
  if (name == "market") {
    reject_unknown({});
    return scenario_market_deadlock();
  }
  if (name == "producer-consumer") {
    reject_unknown({"items"});
    return scenario_producer_consumer(get("items", 3));
  }
  raise(FaultCode::UnknownScenario, name);
}

}  // namespace scooprr
