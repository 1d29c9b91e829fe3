#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "ientropy/backtest.hpp"
#include "ientropy/series.hpp"
#include "support/stream_builders.hpp"
#include "support/strategy_interpreter.hpp"

using namespace ientropy;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

void check_against_interpreter(const TradingDayStream& stream, const StrategyParams& params) {
    const auto series = compute_series(stream);
    const bool prose = params.sell_rule == SellRule::ProseAboveVwap;

    const auto entropy_engine = run_entropy_strategy(stream.symbol, series, params);
    const auto entropy_oracle = testsupport::interpret_day(series, true, prose, params.warmup_trades);
    REQUIRE(entropy_engine.has_value() == entropy_oracle.traded);
    if (entropy_engine) {
        CHECK(entropy_engine->buy_ordinal == entropy_oracle.buy_ordinal);
        CHECK(entropy_engine->buy_price == entropy_oracle.buy_price);
        CHECK(entropy_engine->buy_vwap == entropy_oracle.buy_vwap);
        CHECK(entropy_engine->sell_ordinal == entropy_oracle.sell_ordinal);
        CHECK(entropy_engine->sell_price == entropy_oracle.sell_price);
        CHECK(entropy_engine->sell_vwap == entropy_oracle.sell_vwap);
        CHECK(entropy_engine->return_pct
              == round_trip_return(entropy_oracle.buy_price, entropy_oracle.sell_price));
    }

    const auto vwap_engine = run_vwap_strategy(stream.symbol, series, params);
    const auto vwap_oracle = testsupport::interpret_day(series, false, prose, params.warmup_trades);
    REQUIRE(vwap_engine.has_value() == vwap_oracle.traded);
    if (vwap_engine) {
        CHECK(vwap_engine->buy_ordinal == vwap_oracle.buy_ordinal);
        CHECK(vwap_engine->sell_ordinal == vwap_oracle.sell_ordinal);
        CHECK(vwap_engine->sell_price == vwap_oracle.sell_price);
    }

    // The entropy entry only adds conditions, so it can never trade a day
    // the baseline leaves alone.
    if (entropy_engine) CHECK(vwap_engine.has_value());
}

} // namespace

TEST_CASE("round trip returns are simple percentage moves") {
    CHECK_THAT(round_trip_return(11.7, 12.0), WithinRel(2.564102564102564, 1e-13));
    CHECK(round_trip_return(0.3, 0.3) == 0.0);
    CHECK_THAT(round_trip_return(32.75, 31.7), WithinRel(-3.2061068702290076, 1e-13));
}

TEST_CASE("cumulated return is a plain sum") {
    const double returns[] = {2.5, -1.0, 0.0, 3.25};
    CHECK_THAT(cumulate_returns(returns), WithinRel(4.75, 1e-15));
    CHECK(cumulate_returns({}) == 0.0);
}

TEST_CASE("too short a day trades nothing") {
    std::mt19937_64 rng(1);
    const auto stream = testsupport::random_walk_stream(rng, "TINY", 9);
    CHECK_FALSE(run_entropy_strategy(stream).has_value());
    CHECK_FALSE(run_vwap_strategy(stream).has_value());
}

TEST_CASE("a flat tape never triggers an order") {
    const auto stream = testsupport::constant_stream("FLAT", 50, 20.0, 100);
    CHECK_FALSE(run_entropy_strategy(stream).has_value());
    CHECK_FALSE(run_vwap_strategy(stream).has_value());
}

TEST_CASE("a persistent slide trades the baseline but not the entropy strategy") {
    std::mt19937_64 rng(5);
    const auto stream = testsupport::monotone_stream(rng, "DOWN", 40, false);

    // Every reading is negative on a falling tape, so the entropy entry
    // never arms even though the price sits under the vwap all day.
    CHECK_FALSE(run_entropy_strategy(stream).has_value());

    const auto baseline = run_vwap_strategy(stream);
    REQUIRE(baseline.has_value());
    CHECK(baseline->buy_ordinal == 10);
    CHECK(baseline->sell_ordinal == 40);
    CHECK(baseline->sell_price == stream.trades.back().price);
    CHECK(baseline->return_pct < 0.0);
}

TEST_CASE("a rising tape never dips under its vwap") {
    std::mt19937_64 rng(6);
    const auto stream = testsupport::monotone_stream(rng, "UP", 40, true);
    CHECK_FALSE(run_entropy_strategy(stream).has_value());
    CHECK_FALSE(run_vwap_strategy(stream).has_value());
}

TEST_CASE("the entropy strategy buys a dip in an uptrend and exits over vwap") {
    // Eleven rising prints, a dip under the running vwap, a quiet stretch,
    // then a pop back over the vwap at ordinal 20.
    const std::vector<double> prices{
        100, 101, 102, 103, 104, 105, 106, 107, 108, 109, 110,
        95,  95.5, 95.2, 95.4, 95.1, 95.3, 95.2, 95.4,
        112, 112, 112, 112, 112, 112, 112, 112, 112, 112, 112};
    REQUIRE(prices.size() == 30);
    const auto stream = testsupport::stream_from_prices("DIP", prices);

    const auto trip = run_entropy_strategy(stream);
    REQUIRE(trip.has_value());
    CHECK(trip->buy_ordinal == 12);
    CHECK(trip->buy_price == 95.0);
    CHECK(trip->sell_ordinal == 20);
    CHECK(trip->sell_price == 112.0);
    CHECK_THAT(trip->return_pct, WithinRel(round_trip_return(95.0, 112.0), 1e-15));
    CHECK(trip->buy_vwap > trip->buy_price);
    CHECK(trip->sell_vwap < trip->sell_price);

    // The literal exit comparison sells into the very next under-vwap print.
    StrategyParams literal;
    literal.sell_rule = SellRule::LiteralPseudocode;
    const auto literal_trip = run_entropy_strategy(stream, literal);
    REQUIRE(literal_trip.has_value());
    CHECK(literal_trip->buy_ordinal == 12);
    CHECK(literal_trip->sell_ordinal == 13);

    check_against_interpreter(stream, {});
    check_against_interpreter(stream, literal);
}

TEST_CASE("the baseline buys the first under-vwap print and sells the next pop") {
    std::vector<double> prices;
    for (int i = 0; i < 10; ++i) prices.push_back(100.0 - i);  // 100 down to 91
    prices.push_back(120.0);
    for (int i = 0; i < 4; ++i) prices.push_back(120.0);
    const auto stream = testsupport::stream_from_prices("POP", prices);

    const auto trip = run_vwap_strategy(stream);
    REQUIRE(trip.has_value());
    CHECK(trip->buy_ordinal == 10);
    CHECK(trip->buy_price == 91.0);
    CHECK(trip->sell_ordinal == 11);
    CHECK(trip->sell_price == 120.0);
}

TEST_CASE("an open position is closed at the last trade of the day") {
    std::vector<double> prices;
    for (int i = 0; i < 40; ++i) prices.push_back(100.0 - i * 0.5);
    const auto stream = testsupport::stream_from_prices("EOD", prices);

    const auto trip = run_vwap_strategy(stream);
    REQUIRE(trip.has_value());
    CHECK(trip->buy_ordinal == 10);
    CHECK(trip->sell_ordinal == 40);
    CHECK(trip->sell_price == prices.back());
}

TEST_CASE("a buy opportunity on the final trade is not taken") {
    // Above the vwap all day, a single under-vwap print at the very end.
    std::vector<double> prices;
    for (int i = 0; i < 14; ++i) prices.push_back(100.0 + i);
    prices.push_back(50.0);
    const auto stream = testsupport::stream_from_prices("LAST", prices);

    CHECK_FALSE(run_vwap_strategy(stream).has_value());
    CHECK_FALSE(run_entropy_strategy(stream).has_value());
    check_against_interpreter(stream, {});
}

TEST_CASE("the engine matches a literal reading of the trading rules") {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<std::size_t> length(5, 200);
    for (int instance = 0; instance < 25; ++instance) {
        const auto stream = testsupport::random_walk_stream(rng, "RNG", length(rng));
        for (const SellRule rule : {SellRule::ProseAboveVwap, SellRule::LiteralPseudocode}) {
            StrategyParams params;
            params.sell_rule = rule;
            check_against_interpreter(stream, params);
        }
    }
}

TEST_CASE("reports order symbols, count trades and sum returns") {
    RoundTrip brd;
    brd.symbol = "BRD";
    brd.buy_ordinal = 10;
    brd.buy_price = 11.7;
    brd.buy_vwap = 11.999;
    brd.sell_ordinal = 11;
    brd.sell_price = 12.0;
    brd.sell_vwap = 11.998;
    brd.return_pct = round_trip_return(11.7, 12.0);

    std::vector<SymbolResult> rows;
    rows.push_back({"BRD", brd});
    rows.push_back({"ALR", std::nullopt});
    const auto report = make_report(std::move(rows));

    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].symbol == "ALR");
    CHECK(report.rows[1].symbol == "BRD");
    CHECK(report.traded_count == 1);
    CHECK(report.considered_count == 2);
    CHECK_THAT(report.cumulated_return, WithinRel(brd.return_pct, 1e-15));

    std::ostringstream out;
    write_report_csv(out, report);
    const std::string expected =
        "no,symbol,buy_trade_no,buy_price,buy_vwap,sell_trade_no,sell_price,sell_vwap,return_pct\n"
        "1,ALR,,,,,,,\n"
        "2,BRD,10,11.7,11.999,11,12,11.998," + to_decimal_string(brd.return_pct) + "\n"
        "cumulated_return,,,,,,,," + to_decimal_string(report.cumulated_return) + "\n";
    CHECK(out.str() == expected);
}

TEST_CASE("strategy comparison restricts both totals to the common symbols") {
    const auto trip = [](const char* symbol, double return_pct) {
        RoundTrip t;
        t.symbol = symbol;
        t.return_pct = return_pct;
        return t;
    };

    const auto report_a = make_report({{"X", trip("X", 2.0)}, {"Y", trip("Y", 3.0)},
                                       {"Z", std::nullopt}});
    const auto report_b = make_report({{"X", trip("X", 1.0)}, {"Y", trip("Y", 1.0)},
                                       {"Z", trip("Z", 4.0)}});

    const auto comparison = compare_strategies(report_a, report_b);
    CHECK(comparison.common_traded == 2);
    CHECK(comparison.traded_a == 2);
    CHECK(comparison.traded_b == 3);
    CHECK_THAT(comparison.cumulated_a, WithinRel(5.0, 1e-15));
    CHECK_THAT(comparison.cumulated_b, WithinRel(2.0, 1e-15));
    CHECK_THAT(comparison.average_a, WithinRel(2.5, 1e-15));
    CHECK_THAT(comparison.average_b, WithinRel(1.0, 1e-15));
    REQUIRE(comparison.ratio.has_value());
    CHECK_THAT(*comparison.ratio, WithinRel(2.5, 1e-15));
}

TEST_CASE("identical reports compare at ratio one") {
    RoundTrip t;
    t.symbol = "X";
    t.return_pct = 1.5;
    const auto report = make_report({{"X", t}});
    const auto comparison = compare_strategies(report, report);
    REQUIRE(comparison.ratio.has_value());
    CHECK(*comparison.ratio == 1.0);
    CHECK(comparison.average_a == comparison.average_b);
}

TEST_CASE("comparison has no ratio when nothing is comparable") {
    const auto empty = make_report({});
    const auto comparison = compare_strategies(empty, empty);
    CHECK_FALSE(comparison.ratio.has_value());
    CHECK(comparison.common_traded == 0);
    CHECK(comparison.average_a == 0.0);

    RoundTrip plus;
    plus.symbol = "X";
    plus.return_pct = 1.0;
    RoundTrip minus = plus;
    minus.return_pct = -1.0;
    RoundTrip plus_y = plus;
    plus_y.symbol = "Y";
    RoundTrip minus_y = minus;
    minus_y.symbol = "Y";
    const auto a = make_report({{"X", plus}, {"Y", plus_y}});
    const auto zero_b = make_report({{"X", plus}, {"Y", minus_y}});
    CHECK_FALSE(compare_strategies(a, zero_b).ratio.has_value());
}
