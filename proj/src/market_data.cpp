#include "wvar/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <cstdio>
#include <optional>

#include "wvar/error.hpp"

namespace wvar {
namespace {

constexpr const char* kModule = "market_data";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

std::optional<double> parse_price(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
    if (!std::isfinite(value) || value <= 0.0) return std::nullopt;
    return value;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    const bool shaped = text.size() == 10 && text[4] == '-' && text[7] == '-';
    if (!shaped || !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
        !parse_int(text.substr(8, 2), d)) {
        throw DataError(kModule, "unparseable date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) {
        throw DataError(kModule, "invalid calendar date '" + std::string(text) + "'");
    }
    return date;
}

std::string format_date(Date date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::vector<double> ReturnSeries::values() const { return values_of(observations); }

std::vector<double> values_of(std::span<const ReturnObservation> observations) {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.value);
    return out;
}

std::vector<PriceSeries> load_price_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(kModule, "cannot open price file '" + path.string() + "'");
    }
    return parse_price_csv(in, schema, path.string());
}

std::vector<PriceSeries> parse_price_csv(std::istream& in, const CsvSchema& schema,
                                         std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) {
        throw DataError(kModule, src + ": missing header row");
    }
    // Owned copies: `line` is reused for the data rows.
    std::vector<std::string> header;
    for (const auto cell : split_csv_line(line)) header.emplace_back(cell);
    if (header.size() < 2) {
        throw DataError(kModule, src + ": header needs a date column and at least one price column");
    }
    for (const auto& name : header) {
        if (name.empty()) throw DataError(kModule, src + ": header has an empty column name");
    }

    auto column_index = [&](std::string_view name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw DataError(kModule, src + ": header has no column '" + std::string(name) + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };

    const std::size_t date_col = schema.date_column.empty() ? 0 : column_index(schema.date_column);
    std::vector<std::size_t> price_cols;
    if (schema.close_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (c != date_col) price_cols.push_back(c);
        }
    } else {
        for (const auto& name : schema.close_columns) price_cols.push_back(column_index(name));
    }
    if (price_cols.empty()) throw DataError(kModule, src + ": no price columns selected");

    struct Row {
        Date date;
        std::vector<double> closes;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw DataError(kModule, src + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " cells, found " +
                                         std::to_string(cells.size()));
        }
        Row row{parse_date(cells[date_col]), {}};
        bool usable = true;
        for (const auto c : price_cols) {
            const auto price = parse_price(cells[c]);
            if (!price) {
                usable = false;
                break;
            }
            row.closes.push_back(*price);
        }
        if (usable) rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw DataError(kModule, src + ": duplicate date " + format_date(rows[i].date));
        }
    }

    std::vector<PriceSeries> out(price_cols.size());
    for (std::size_t j = 0; j < price_cols.size(); ++j) {
        out[j].asset_id = std::string(header[price_cols[j]]);
        out[j].observations.reserve(rows.size());
        for (const auto& row : rows) out[j].observations.push_back({row.date, row.closes[j]});
    }
    return out;
}

ReturnSeries compute_returns(const PriceSeries& prices) {
    if (prices.size() < 2) {
        throw InvalidArgument(kModule, "asset '" + prices.asset_id +
                                           "' needs at least 2 prices to form a return");
    }
    ReturnSeries out{prices.asset_id, {}};
    out.observations.reserve(prices.size() - 1);
    for (std::size_t k = 1; k < prices.size(); ++k) {
        const auto& prev = prices.observations[k - 1];
        const auto& cur = prices.observations[k];
        if (!(prev.date < cur.date)) {
            throw DataError(kModule, "asset '" + prices.asset_id + "' dates are not strictly increasing at " +
                                         format_date(cur.date));
        }
        if (!(prev.close > 0.0) || !(cur.close > 0.0)) {
            throw DataError(kModule, "asset '" + prices.asset_id + "' has a nonpositive close near " +
                                         format_date(cur.date));
        }
        out.observations.push_back({cur.date, (cur.close - prev.close) / prev.close});
    }
    return out;
}

std::vector<double> reconstruct_closes(double first_close, std::span<const double> returns) {
    std::vector<double> closes{first_close};
    closes.reserve(returns.size() + 1);
    for (const double r : returns) closes.push_back(closes.back() * (1.0 + r));
    return closes;
}

void WindowSpec::validate() const {
    if (step == 0) throw InvalidArgument(kModule, "window step must be positive");
    if (mode == WindowMode::rolling && length < 2) {
        throw InvalidArgument(kModule, "rolling window length must be at least 2, got " +
                                           std::to_string(length));
    }
    if (length == 0) throw InvalidArgument(kModule, "window length must be positive");
}

std::vector<Window> windows(const ReturnSeries& series, const WindowSpec& spec) {
    spec.validate();
    const auto& obs = series.observations;
    if (obs.size() < spec.length + 1) {
        throw DataError(kModule, "series '" + series.asset_id + "' has " + std::to_string(obs.size()) +
                                     " observations; a window of " + std::to_string(spec.length) +
                                     " needs at least " + std::to_string(spec.length + 1));
    }
    std::vector<Window> out;
    out.reserve((obs.size() - spec.length - 1) / spec.step + 1);
    const std::span<const ReturnObservation> all(obs);
    for (std::size_t end = spec.length; end < obs.size(); end += spec.step) {
        const std::size_t begin = spec.mode == WindowMode::rolling ? end - spec.length : 0;
        out.push_back({all.subspan(begin, end - begin), obs[end]});
    }
    return out;
}

WindowMode parse_window_mode(std::string_view text) {
    if (text == "rolling") return WindowMode::rolling;
    if (text == "expanding") return WindowMode::expanding;
    throw InvalidArgument(kModule, "window mode must be 'rolling' or 'expanding', got '" +
                                       std::string(text) + "'");
}

}  // namespace wvar
