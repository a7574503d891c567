#pragma once

#include <string>

#include "ordcausal/balance.hpp"
#include "ordcausal/estimation.hpp"
#include "ordcausal/simulation.hpp"

namespace ordcausal {

// Markdown tables with fixed column order and 3-decimal rounding.

// Covariate | tau (raw) | tau_bar rows, sorted as stored.
std::string render_balance_table(const BalanceMatrix& matrix);

// Pairs as columns, one row of "estimate (se)", ** when 0 is outside the
// 95% interval.
std::string render_effect_table(const EffectTable& table);

// Estimator rows with Average/Complete coverage columns and mean bias (SD)
// for the comparisons against the lowest level.
std::string render_simulation_summary(const SimulationSummary& summary);

}  // namespace ordcausal
