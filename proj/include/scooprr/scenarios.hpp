#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scooprr/program.hpp"

namespace scooprr {

// Two investors buy a software issuer at their own market, then each tries to
// pick up a backup issuer at the other investor's market while still holding
// its own. The cross purchases corner each other: nine approvals, then a
// four-node wait cycle through both markets.
Scenario scenario_market_deadlock();

// One producer pushes `items` values through a shared buffer while a consumer
// drains it, waiting on the buffer's count. Always terminates.
Scenario scenario_producer_consumer(int64_t items);

// Uneven produce/consume counts. More consumes than produces starves the
// consumer: the run deadlocks without any lock cycle.
Scenario scenario_producer_consumer_counts(int64_t produce, int64_t consume);

// Two investors race to buy consecutive issuers at one market. A single
// approval-order choice point yields exactly two schedules, told apart by the
// order of the market's purchase log.
Scenario scenario_fig1_transaction();

// Same calls as scenario_fig1_transaction, but the issuer arithmetic runs
// before either call instead of between them. Local reordering must not
// change what gets recorded.
Scenario scenario_fig1_transaction_compute_early();

// Names accepted by make_scenario, sorted.
std::vector<std::string> scenario_names();

// Registry lookup used by the command line. `overrides` adjusts named
// integer parameters (producer-consumer understands "items"). Faults
// UnknownScenario for an unknown name, Internal for an unknown parameter.
Scenario make_scenario(const std::string& name,
                       const std::map<std::string, int64_t>& overrides = {});

}  // namespace scooprr
