#pragma once

// Umbrella header for the whole library.

#include "ientropy/backtest.hpp"
#include "ientropy/entropy.hpp"
#include "ientropy/error.hpp"
#include "ientropy/numeric.hpp"
#include "ientropy/series.hpp"
#include "ientropy/signals.hpp"
#include "ientropy/trade.hpp"
#include "ientropy/trade_csv.hpp"
#include "ientropy/treemap.hpp"
#include "ientropy/vwap.hpp"
