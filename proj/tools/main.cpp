#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ientropy/ientropy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ientropy;

namespace {

struct RunConfig {
    std::string input;
    std::vector<std::string> symbols;   // empty selects every symbol
    std::string mode = "all";           // entropy command: open|prev|vwap|all
    std::string map_mode = "prev";      // map command: open|prev|vwap
    std::int64_t warmup = 10;
    double epsilon = 1e-4;
    std::int64_t window = 3;            // sustained-crossing window for lead times
    std::string sell_rule = "prose";    // prose|literal
    std::string caps;                   // market-cap sidecar path
    std::string out = ".";
};

constexpr double kMapCanvasWidth = 1200.0;
constexpr double kMapCanvasHeight = 800.0;

// Runs fn(0..count-1) on a bounded pool; results must go to per-index slots.
// The first exception wins and is rethrown on the caller's thread.
template <typename Fn>
void parallel_for_each(std::size_t count, Fn&& fn) {
    if (count == 0) return;
    const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(count, hardware);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < count;) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (std::thread& thread : pool) thread.join();
    if (error) std::rethrow_exception(error);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (const char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

json digest_entry(const fs::path& path) {
    const std::string bytes = read_file(path);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return json{{"path", path.string()}, {"fnv1a64", hex}, {"bytes", bytes.size()}};
}

// Every run drops a manifest next to its outputs: the effective settings and
// a digest of each input, so any result can be traced back to what produced
// it. No timestamps; two identical runs leave identical manifests.
void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    const std::vector<fs::path>& inputs, std::vector<std::string> outputs) {
    std::sort(outputs.begin(), outputs.end());
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    manifest["inputs"] = json::array();
    for (const fs::path& input : inputs) manifest["inputs"].push_back(digest_entry(input));
    manifest["outputs"] = outputs;
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<Trade> load_trades(const RunConfig& cfg) {
    std::ifstream in(cfg.input, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + cfg.input);
    auto trades = parse_trades(in);
    if (!cfg.symbols.empty()) {
        const std::set<std::string> wanted(cfg.symbols.begin(), cfg.symbols.end());
        std::erase_if(trades, [&](const Trade& t) { return !wanted.contains(t.symbol); });
    }
    return trades;
}

ReferenceMode mode_from_name(const std::string& name) {
    if (name == "open") return ReferenceMode::OpenPrice;
    if (name == "prev") return ReferenceMode::PrecedingTrade;
    return ReferenceMode::MovingVwap;
}

std::vector<std::pair<SeriesKind, std::string>> selected_modes(const std::string& mode) {
    std::vector<std::pair<SeriesKind, std::string>> kinds;
    if (mode == "open" || mode == "all") kinds.emplace_back(SeriesKind::EntropyOpen, "open");
    if (mode == "prev" || mode == "all") kinds.emplace_back(SeriesKind::EntropyPreceding, "prev");
    if (mode == "vwap" || mode == "all") kinds.emplace_back(SeriesKind::EntropyVwap, "vwap");
    return kinds;
}

double series_value(const EntropySeriesPoint& point, SeriesKind kind) {
    switch (kind) {
        case SeriesKind::EntropyOpen: return point.h_open;
        case SeriesKind::EntropyPreceding: return point.h_prev;
        case SeriesKind::EntropyVwap: return point.h_vwap;
        case SeriesKind::PriceMinusVwap: return point.price - point.vwap;
    }
    return 0.0;
}

std::vector<SeriesPoint> project_series(const std::vector<EntropySeriesPoint>& series,
                                        SeriesKind kind) {
    std::vector<SeriesPoint> points;
    points.reserve(series.size());
    for (const EntropySeriesPoint& p : series) points.push_back({p.ordinal, series_value(p, kind)});
    return points;
}

std::string date_stamp(const Timestamp& ts) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u", static_cast<int>(ts.year),
                  static_cast<unsigned>(ts.month), static_cast<unsigned>(ts.day));
    return buffer;
}

json config_echo(const RunConfig& cfg, std::initializer_list<const char*> keys) {
    json echo;
    for (const std::string key : keys) {
        if (key == "input") echo["input"] = cfg.input;
        else if (key == "symbols") echo["symbols"] = cfg.symbols;
        else if (key == "mode") echo["mode"] = cfg.mode;
        else if (key == "map_mode") echo["mode"] = cfg.map_mode;
        else if (key == "warmup") echo["warmup"] = cfg.warmup;
        else if (key == "epsilon") echo["epsilon"] = cfg.epsilon;
        else if (key == "window") echo["window"] = cfg.window;
        else if (key == "sell_rule") echo["sell_rule"] = cfg.sell_rule;
        else if (key == "caps") echo["caps"] = cfg.caps;
        else if (key == "out") echo["out"] = cfg.out;
    }
    return echo;
}

int cmd_validate(const RunConfig& cfg) {
    const auto trades = load_trades(cfg);
    const auto streams = partition_by_symbol(trades);
    std::cout << cfg.input << ": " << trades.size() << " trades, " << streams.size()
              << " symbols\n";
    for (const auto& [symbol, stream] : streams) {
        std::cout << "  " << symbol << ": " << stream.trades.size() << " trades\n";
    }
    std::cout << "ok\n";
    return 0;
}

int cmd_entropy(const RunConfig& cfg) {
    const auto trades = load_trades(cfg);
    const auto streams = partition_by_symbol(trades);
    if (streams.empty()) {
        std::cerr << "warning: no symbols selected, nothing to do\n";
        return 0;
    }
    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);

    std::vector<const TradingDayStream*> ordered;
    ordered.reserve(streams.size());
    for (const auto& [symbol, stream] : streams) ordered.push_back(&stream);

    const auto kinds = selected_modes(cfg.mode);
    std::vector<std::string> summaries(ordered.size());
    std::vector<std::vector<std::string>> files(ordered.size());

    parallel_for_each(ordered.size(), [&](std::size_t index) {
        const TradingDayStream& stream = *ordered[index];
        const auto series = compute_series(stream);

        const std::string series_name = stream.symbol + "-series.csv";
        std::ostringstream series_text;
        write_series_csv(series_text, series);
        write_file(out_dir / series_name, series_text.str());

        std::vector<CrossingEvent> events;
        for (const auto& [kind, name] : kinds) {
            const auto sub = detect_crossings(project_series(series, kind), kind);
            events.insert(events.end(), sub.begin(), sub.end());
        }
        {
            const auto sub = detect_crossings(project_series(series, SeriesKind::PriceMinusVwap),
                                              SeriesKind::PriceMinusVwap);
            events.insert(events.end(), sub.begin(), sub.end());
        }
        std::sort(events.begin(), events.end(), [](const CrossingEvent& a, const CrossingEvent& b) {
            if (a.ordinal != b.ordinal) return a.ordinal < b.ordinal;
            if (a.series != b.series) return a.series < b.series;
            return a.direction < b.direction;
        });
        const std::string signals_name = stream.symbol + "-signals.csv";
        std::ostringstream signals_text;
        write_signals_csv(signals_text, events);
        write_file(out_dir / signals_name, signals_text.str());

        files[index] = {series_name, signals_name};

        std::ostringstream summary;
        summary << stream.symbol << ": trades=" << series.size();
        if (!series.empty()) {
            const EntropySeriesPoint& last = series.back();
            summary << " h_open=" << to_decimal_string(last.h_open)
                    << " h_prev=" << to_decimal_string(last.h_prev)
                    << " h_vwap=" << to_decimal_string(last.h_vwap);
        }
        const auto price_points = project_series(series, SeriesKind::PriceMinusVwap);
        std::vector<SeriesPoint> prices, vwaps;
        prices.reserve(series.size());
        vwaps.reserve(series.size());
        for (const EntropySeriesPoint& p : series) {
            prices.push_back({p.ordinal, p.price});
            vwaps.push_back({p.ordinal, p.vwap});
        }
        for (const auto& [kind, name] : kinds) {
            const auto points = project_series(series, kind);
            const char* stance = "none";
            if (!points.empty()) {
                switch (classify_direction(points.back().value, cfg.epsilon)) {
                    case Direction::BuyInclined: stance = "buy"; break;
                    case Direction::SellInclined: stance = "sell"; break;
                    case Direction::Indeterminate: stance = "none"; break;
                }
            }
            const auto lead = lead_time(points, prices, vwaps, cfg.window);
            summary << " signal[" << name << "]=" << stance << " lead[" << name
                    << "]=" << (lead ? std::to_string(*lead) : "n/a");
        }
        summaries[index] = summary.str();
    });

    for (const std::string& line : summaries) std::cout << line << '\n';

    std::vector<std::string> outputs;
    for (const auto& list : files) outputs.insert(outputs.end(), list.begin(), list.end());
    write_manifest(out_dir, "entropy",
                   config_echo(cfg, {"input", "symbols", "mode", "epsilon", "window", "out"}),
                   {fs::path(cfg.input)}, std::move(outputs));
    return 0;
}

int cmd_backtest(const RunConfig& cfg) {
    const auto trades = load_trades(cfg);
    const auto streams = partition_by_symbol(trades);
    if (streams.empty()) {
        std::cerr << "warning: no symbols selected, nothing to do\n";
        return 0;
    }
    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);

    StrategyParams params;
    params.warmup_trades = cfg.warmup;
    params.sell_rule = cfg.sell_rule == "literal" ? SellRule::LiteralPseudocode
                                                  : SellRule::ProseAboveVwap;

    std::vector<const TradingDayStream*> ordered;
    ordered.reserve(streams.size());
    for (const auto& [symbol, stream] : streams) ordered.push_back(&stream);

    std::vector<SymbolResult> entropy_rows(ordered.size());
    std::vector<SymbolResult> vwap_rows(ordered.size());
    parallel_for_each(ordered.size(), [&](std::size_t index) {
        const TradingDayStream& stream = *ordered[index];
        const auto series = compute_series(stream);
        entropy_rows[index] = {stream.symbol, run_entropy_strategy(stream.symbol, series, params)};
        vwap_rows[index] = {stream.symbol, run_vwap_strategy(stream.symbol, series, params)};
    });

    const auto entropy_report = make_report(std::move(entropy_rows));
    const auto vwap_report = make_report(std::move(vwap_rows));

    std::ostringstream entropy_text;
    write_report_csv(entropy_text, entropy_report);
    write_file(out_dir / "entropy-report.csv", entropy_text.str());
    std::ostringstream vwap_text;
    write_report_csv(vwap_text, vwap_report);
    write_file(out_dir / "vwap-report.csv", vwap_text.str());

    const auto comparison = compare_strategies(entropy_report, vwap_report);
    std::cout << "symbols considered: " << entropy_report.considered_count << '\n'
              << "entropy strategy: traded " << entropy_report.traded_count
              << ", cumulated return " << to_decimal_string(entropy_report.cumulated_return)
              << "%\n"
              << "vwap strategy: traded " << vwap_report.traded_count << ", cumulated return "
              << to_decimal_string(vwap_report.cumulated_return) << "%\n"
              << "common symbols: " << comparison.common_traded << '\n';
    if (comparison.common_traded > 0) {
        std::cout << "  entropy: cumulated " << to_decimal_string(comparison.cumulated_a)
                  << "%, average " << to_decimal_string(comparison.average_a) << "%\n"
                  << "  vwap: cumulated " << to_decimal_string(comparison.cumulated_b)
                  << "%, average " << to_decimal_string(comparison.average_b) << "%\n";
        if (comparison.ratio) {
            std::cout << "  return ratio: " << to_decimal_string(*comparison.ratio) << '\n';
        } else {
            std::cout << "  return ratio: undefined\n";
        }
    }

    write_manifest(out_dir, "backtest",
                   config_echo(cfg, {"input", "symbols", "warmup", "sell_rule", "out"}),
                   {fs::path(cfg.input)}, {"entropy-report.csv", "vwap-report.csv"});
    return 0;
}

int cmd_map(const RunConfig& cfg) {
    const auto trades = load_trades(cfg);
    const auto streams = partition_by_symbol(trades);
    if (streams.empty()) {
        std::cerr << "warning: no symbols selected, nothing to do\n";
        return 0;
    }
    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);

    std::map<std::string, double> caps;
    const bool use_caps = !cfg.caps.empty();
    if (use_caps) {
        std::ifstream caps_in(cfg.caps, std::ios::binary);
        if (!caps_in) throw std::runtime_error("cannot open caps file: " + cfg.caps);
        caps = parse_market_caps(caps_in);
    } else {
        std::cerr << "note: no --caps given, weighting tiles by traded value\n";
    }

    const ReferenceMode mode = mode_from_name(cfg.map_mode);

    std::vector<const TradingDayStream*> ordered;
    ordered.reserve(streams.size());
    for (const auto& [symbol, stream] : streams) ordered.push_back(&stream);

    std::vector<MapInput> inputs(ordered.size());
    parallel_for_each(ordered.size(), [&](std::size_t index) {
        const TradingDayStream& stream = *ordered[index];
        EntropyAccumulator acc(mode);
        double traded_value = 0.0;
        for (const Trade& trade : stream.trades) {
            acc.add(trade);
            traded_value += trade.price * static_cast<double>(trade.quantity);
        }
        double weight = traded_value;
        if (use_caps) {
            const auto it = caps.find(stream.symbol);
            if (it == caps.end()) {
                throw ValidationError("no market cap for symbol " + stream.symbol);
            }
            weight = it->second;
        }
        inputs[index] = {stream.symbol, weight, acc.value()};
    });

    const auto nodes = build_market_map(inputs, kMapCanvasWidth, kMapCanvasHeight, cfg.epsilon);

    Timestamp first = ordered.front()->trades.front().timestamp;
    for (const TradingDayStream* stream : ordered) {
        first = std::min(first, stream->trades.front().timestamp);
    }
    const std::string date = date_stamp(first);
    const std::string svg_name = date + "-map.svg";
    const std::string json_name = date + "-map.json";
    write_file(out_dir / svg_name, emit_map_svg(nodes, kMapCanvasWidth, kMapCanvasHeight));
    write_file(out_dir / json_name, emit_map_json(nodes));

    std::cout << "mapped " << nodes.size() << " symbols to " << svg_name << " and "
              << json_name << '\n';

    std::vector<fs::path> manifest_inputs{fs::path(cfg.input)};
    if (use_caps) manifest_inputs.push_back(fs::path(cfg.caps));
    write_manifest(out_dir, "map",
                   config_echo(cfg, {"input", "symbols", "map_mode", "epsilon", "caps", "out"}),
                   manifest_inputs, {svg_name, json_name});
    return 0;
}

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--input", cfg.input, "tick CSV file (timestamp,symbol,quantity,price)")
        ->required();
    cmd->add_option("--symbols", cfg.symbols, "comma-separated symbol filter")
        ->delimiter(',');
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"intraday entropy analytics over tick data"};
    app.require_subcommand(1);
    // Options in a [subcommand] section of the file fill in anything the
    // command line left at its default; explicit flags always win.
    app.set_config("--config", "", "TOML-style defaults file; flags win");
    app.fallthrough();
    RunConfig cfg;

    CLI::App* validate = app.add_subcommand("validate", "check a tick file and report its shape");
    add_common_options(validate, cfg);

    CLI::App* entropy = app.add_subcommand("entropy", "per-symbol entropy series and signals");
    add_common_options(entropy, cfg);
    entropy->add_option("--mode", cfg.mode, "reference price: open|prev|vwap|all")
        ->check(CLI::IsMember({"open", "prev", "vwap", "all"}));
    entropy->add_option("--epsilon", cfg.epsilon, "indeterminate band half-width")
        ->check(CLI::NonNegativeNumber);
    entropy->add_option("--window", cfg.window, "consecutive negatives for a sustained crossing")
        ->check(CLI::PositiveNumber);
    entropy->add_option("--out", cfg.out, "output directory");

    CLI::App* backtest = app.add_subcommand("backtest", "run both day-trading strategies");
    add_common_options(backtest, cfg);
    backtest->add_option("--warmup", cfg.warmup, "trades observed before any order")
        ->check(CLI::NonNegativeNumber);
    backtest->add_option("--sell-rule", cfg.sell_rule, "exit comparison: prose|literal")
        ->check(CLI::IsMember({"prose", "literal"}));
    backtest->add_option("--out", cfg.out, "output directory");

    CLI::App* map_cmd = app.add_subcommand("map", "entropy market map (svg + json)");
    add_common_options(map_cmd, cfg);
    map_cmd->add_option("--mode", cfg.map_mode, "reference price: open|prev|vwap")
        ->check(CLI::IsMember({"open", "prev", "vwap"}));
    map_cmd->add_option("--epsilon", cfg.epsilon, "indeterminate band half-width")
        ->check(CLI::NonNegativeNumber);
    map_cmd->add_option("--caps", cfg.caps, "market-cap sidecar CSV (symbol,market_cap)");
    map_cmd->add_option("--out", cfg.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(cfg);
        if (entropy->parsed()) return cmd_entropy(cfg);
        if (backtest->parsed()) return cmd_backtest(cfg);
        if (map_cmd->parsed()) return cmd_map(cfg);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
