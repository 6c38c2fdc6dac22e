#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wvar {

using Date = std::chrono::year_month_day;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws DataError.
Date parse_date(std::string_view text);
std::string format_date(Date date);

struct PriceObservation {
    Date date;
    double close;
};

struct PriceSeries {
    std::string asset_id;
    std::vector<PriceObservation> observations;

    std::size_t size() const noexcept { return observations.size(); }
};

struct ReturnObservation {
    Date date;
    double value;
};

struct ReturnSeries {
    std::string asset_id;
    std::vector<ReturnObservation> observations;

    std::size_t size() const noexcept { return observations.size(); }
    std::vector<double> values() const;
};

/// Column mapping for a wide price CSV. An empty date column selects the
/// first column; empty close_columns selects every remaining column.
struct CsvSchema {
    std::string date_column;
    std::vector<std::string> close_columns;
};

/// Reads a wide CSV (date, then one close column per asset). Rows are sorted
/// by date. A row whose selected cells contain a blank, unparseable, or
/// nonpositive price is dropped for all assets so the series stay aligned.
std::vector<PriceSeries> load_price_csv(const std::filesystem::path& path,
                                        const CsvSchema& schema = {});
std::vector<PriceSeries> parse_price_csv(std::istream& in, const CsvSchema& schema = {},
                                         std::string_view source = "<stream>");

/// Simple returns (P_t - P_{t-1}) / P_{t-1}, dated at the later day.
ReturnSeries compute_returns(const PriceSeries& prices);

/// Rebuilds closes from the first close and a return path.
std::vector<double> reconstruct_closes(double first_close, std::span<const double> returns);

enum class WindowMode { rolling, expanding };

/// In rolling mode `length` is the exact in-sample size; in expanding mode it
/// is the minimum in-sample size.
struct WindowSpec {
    WindowMode mode = WindowMode::rolling;
    std::size_t length = 250;
    std::size_t step = 1;

    void validate() const;
};

struct Window {
    std::span<const ReturnObservation> in_sample;
    ReturnObservation next;
};

/// Windows over `series`; each in-sample slice ends strictly before `next`.
/// The spans view into `series`, which must outlive the result.
std::vector<Window> windows(const ReturnSeries& series, const WindowSpec& spec);

std::vector<double> values_of(std::span<const ReturnObservation> observations);

WindowMode parse_window_mode(std::string_view text);

}  // namespace wvar
