#pragma once

#include <json.hpp>

#include "ordcausal/balance.hpp"
#include "ordcausal/design.hpp"
#include "ordcausal/estimation.hpp"
#include "ordcausal/multinomial_logit.hpp"
#include "ordcausal/ordered_logit.hpp"
#include "ordcausal/simulation.hpp"

namespace ordcausal {

// Insertion-ordered documents keep report bytes stable across runs.
using Json = nlohmann::ordered_json;

Json to_json(const OrdinalFit& fit);
Json to_json(const SupportReport& report);
Json to_json(const SubclassPartition& partition);
Json to_json(const PartitionValidation& validation);
Json to_json(const TauResult& result);
Json to_json(const BalanceMatrix& matrix);
Json to_json(const PlotBundle& bundle);
Json to_json(const GlobalTest& test);
Json to_json(const EffectTable& table);
Json to_json(const IptwResult& result);
Json to_json(const SimulationSummary& summary);

}  // namespace ordcausal
