#include "mbv/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "mbv/error.hpp"
#include "mbv/kernels.hpp"

namespace mbv::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view s, std::size_t line, const char* field) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    if (!s.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || s.empty()) {
        fail(line, std::string("bad ") + field + " '" + std::string(s) + "'");
    }
    return v;
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
    if (!s.empty() && s.front() == '-') s.remove_prefix(1);
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Timestamp parse_iso8601(std::string_view s) {
    auto bad = [&]() -> Timestamp {
        throw Error(ErrorCode::ParseError, "bad ISO-8601 timestamp '" + std::string(s) + "'");
    };
    // YYYY-MM-DD[T ]HH:MM:SS
    if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':' || s[16] != ':') {
        return bad();
    }
    int year = 0;
    unsigned month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!parse_int(s.substr(0, 4), year) || !parse_int(s.substr(5, 2), month) ||
        !parse_int(s.substr(8, 2), day) || !parse_int(s.substr(11, 2), hour) ||
        !parse_int(s.substr(14, 2), minute) || !parse_int(s.substr(17, 2), second)) {
        return bad();
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return bad();

    std::string_view rest = s.substr(19);
    std::int64_t nanos = 0;
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        std::size_t digits = 0;
        while (digits < rest.size() && rest[digits] >= '0' && rest[digits] <= '9') ++digits;
        if (digits == 0) return bad();
        for (std::size_t k = 0; k < 9; ++k) {
            nanos = nanos * 10 + (k < digits ? rest[k] - '0' : 0);
        }
        rest.remove_prefix(digits);
    }
    std::int64_t offset_seconds = 0;
    if (rest == "Z" || rest.empty()) {
    } else if ((rest.front() == '+' || rest.front() == '-') && rest.size() == 6 && rest[3] == ':') {
        unsigned oh = 0, om = 0;
        if (!parse_int(rest.substr(1, 2), oh) || !parse_int(rest.substr(4, 2), om)) return bad();
        offset_seconds = (rest.front() == '+' ? 1 : -1) * static_cast<std::int64_t>(oh * 3600 + om * 60);
    } else {
        return bad();
    }

    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    const std::int64_t secs = static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 +
                              second - offset_seconds;
    return secs * 1'000'000'000 + nanos;
}

std::vector<std::string_view> expect_header(std::istream& in, std::string& buffer,
                                            const std::vector<std::string_view>& expected) {
    if (!std::getline(in, buffer)) fail(1, "missing header");
    auto fields = split(buffer);
    if (!fields.empty() && fields.front().starts_with("\xEF\xBB\xBF")) {
        fields.front().remove_prefix(3);
    }
    if (fields != expected) {
        std::string want;
        for (const auto f : expected) want += (want.empty() ? "" : ",") + std::string(f);
        fail(1, "expected header '" + want + "'");
    }
    return fields;
}

std::optional<double> json_opt(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

Timestamp parse_timestamp(std::string_view text, TimestampFormat format) {
    text = trim(text);
    const bool integer = all_digits(text);
    if (format == TimestampFormat::EpochNs || (format == TimestampFormat::Auto && integer)) {
        Timestamp ts = 0;
        if (!parse_int(text, ts)) {
            throw Error(ErrorCode::ParseError, "bad epoch-ns timestamp '" + std::string(text) + "'");
        }
        return ts;
    }
    return parse_iso8601(text);
}

std::string format_iso8601(Timestamp ts) {
    using namespace std::chrono;
    const sys_time<nanoseconds> tp{nanoseconds{ts}};
    const auto day_point = floor<days>(tp);
    const year_month_day ymd{day_point};
    const auto tod = tp - day_point;
    const auto h = duration_cast<hours>(tod);
    const auto m = duration_cast<minutes>(tod - h);
    const auto s = duration_cast<seconds>(tod - h - m);
    const auto ns = (tod - h - m - s).count();
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%09lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(h.count()), static_cast<int>(m.count()),
                  static_cast<int>(s.count()), static_cast<long long>(ns));
    return buf;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Tape CSV

std::vector<TapeRow> read_tape_csv(std::istream& in, TimestampFormat format) {
    std::string buffer;
    expect_header(in, buffer, {"security_id", "timestamp", "price", "volume"});
    std::vector<TapeRow> rows;
    std::size_t line = 1;
    while (std::getline(in, buffer)) {
        ++line;
        if (trim(buffer).empty()) continue;
        const auto f = split(buffer);
        if (f.size() != 4) fail(line, "expected 4 fields, found " + std::to_string(f.size()));
        if (f[0].empty()) fail(line, "empty security_id");
        TapeRow row;
        row.security_id = std::string(f[0]);
        try {
            row.timestamp = parse_timestamp(f[1], format);
        } catch (const Error& e) {
            fail(line, e.detail());
        }
        row.price = parse_double(f[2], line, "price");
        row.volume = parse_double(f[3], line, "volume");
        row.line = line;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RowViolation> check_tape_rows(const std::vector<TapeRow>& rows) {
    std::vector<RowViolation> out;
    std::map<std::string, kernels::CompensatedSum> totals;
    for (const auto& r : rows) {
        if (!std::isfinite(r.price) || !std::isfinite(r.volume)) {
            out.push_back({"nonfinite_field", r.security_id, r.line});
            totals[r.security_id];
            continue;
        }
        if (r.price <= 0.0) out.push_back({"nonpositive_price", r.security_id, r.line});
        if (r.volume < 0.0) out.push_back({"negative_volume", r.security_id, r.line});
        totals[r.security_id].add(r.volume > 0.0 ? r.volume : 0.0);
    }
    for (const auto& [id, total] : totals) {
        if (!(total.value() > 0.0)) out.push_back({"zero_total_volume", id, 0});
    }
    return out;
}

std::map<std::string, std::vector<RawTrade>> group_by_security(const std::vector<TapeRow>& rows) {
    std::map<std::string, std::vector<RawTrade>> out;
    for (const auto& r : rows) out[r.security_id].push_back({r.timestamp, r.price, r.volume});
    return out;
}

void write_tape_csv(std::ostream& out, std::span<const SecurityTape> tapes) {
    out << "security_id,timestamp,price,volume\n";
    for (const auto& tape : tapes) {
        const auto& w = tape.window();
        for (const auto& t : tape.trades()) {
            // Bin midpoint, so re-binning on the same window reproduces the grid.
            const Timestamp ts = w.instant(t.grid_index) - w.span() / 2;
            out << tape.security_id() << ',' << ts << ',' << format_double(t.price) << ','
                << format_double(t.volume) << '\n';
        }
    }
}

// ---------------------------------------------------------------------------
// Portfolio CSV

std::vector<HoldingInput> read_portfolio_csv(std::istream& in) {
    std::string buffer;
    expect_header(in, buffer, {"security_id", "shares", "base_price"});
    std::vector<HoldingInput> out;
    std::size_t line = 1;
    while (std::getline(in, buffer)) {
        ++line;
        if (trim(buffer).empty()) continue;
        const auto f = split(buffer);
        if (f.size() != 3) fail(line, "expected 3 fields, found " + std::to_string(f.size()));
        if (f[0].empty()) fail(line, "empty security_id");
        out.push_back({std::string(f[0]), parse_double(f[1], line, "shares"),
                       parse_double(f[2], line, "base_price")});
    }
    return out;
}

void write_portfolio_csv(std::ostream& out, const PortfolioSpec& spec) {
    out << "security_id,shares,base_price\n";
    for (const auto& h : spec.holdings()) {
        out << h.security_id << ',' << format_double(h.shares) << ',' << format_double(h.base_price)
            << '\n';
    }
}

// ---------------------------------------------------------------------------
// Report

nlohmann::json report_to_json(const VarianceReport& r) {
    using nlohmann::json;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    const auto& m = r.moments;
    return json{
        {"security_ids", r.security_ids},
        {"n", r.trade_count},
        {"theta_m", r.theta_m},
        {"theta", r.theta},
        {"theta_t", opt(r.theta_t)},
        {"taylor_a", opt(r.taylor_a)},
        {"mean_return", r.mean_return},
        {"psi_sq", m.psi_sq},
        {"chi_sq", m.chi_sq},
        {"phi", m.phi},
        {"divergence", opt(r.divergence)},
        {"covariance_weighting", to_string(r.weighting)},
        {"theta_jk", r.theta_jk.rows()},
        {"moments",
         {{"q1", m.value_mean},
          {"q2", m.value_mean_sq},
          {"w1", m.volume_mean},
          {"w2", m.volume_mean_sq},
          {"psi_q", m.value_var},
          {"psi_w", m.volume_var},
          {"cov_qw", m.value_volume_cov}}},
    };
}

VarianceReport report_from_json(const nlohmann::json& j) {
    try {
        VarianceReport r;
        r.security_ids = j.at("security_ids").get<std::vector<std::string>>();
        r.trade_count = j.at("n").get<std::size_t>();
        r.theta_m = j.at("theta_m").get<double>();
        r.theta = j.at("theta").get<double>();
        r.theta_t = json_opt(j, "theta_t");
        r.taylor_a = json_opt(j, "taylor_a");
        r.mean_return = j.at("mean_return").get<double>();
        r.divergence = json_opt(j, "divergence");
        const auto weighting = j.at("covariance_weighting").get<std::string>();
        if (weighting == "equal") {
            r.weighting = CovarianceWeighting::Equal;
        } else if (weighting == "volume") {
            r.weighting = CovarianceWeighting::Volume;
        } else {
            throw Error(ErrorCode::ParseError, "unknown covariance_weighting " + weighting);
        }

        auto& m = r.moments;
        m.trade_count = r.trade_count;
        m.psi_sq = j.at("psi_sq").get<double>();
        m.chi_sq = j.at("chi_sq").get<double>();
        m.phi = j.at("phi").get<double>();
        const auto& mj = j.at("moments");
        m.value_mean = mj.at("q1").get<double>();
        m.value_mean_sq = mj.at("q2").get<double>();
        m.volume_mean = mj.at("w1").get<double>();
        m.volume_mean_sq = mj.at("w2").get<double>();
        m.value_var = mj.at("psi_q").get<double>();
        m.volume_var = mj.at("psi_w").get<double>();
        m.value_volume_cov = mj.at("cov_qw").get<double>();

        const auto rows = j.at("theta_jk").get<std::vector<std::vector<double>>>();
        r.theta_jk = CovarianceMatrix(rows.size());
        for (std::size_t a = 0; a < rows.size(); ++a) {
            if (rows[a].size() != rows.size()) {
                throw Error(ErrorCode::ParseError, "theta_jk is not square");
            }
            for (std::size_t b = a; b < rows.size(); ++b) r.theta_jk.set(a, b, rows[a][b]);
        }
        if (rows.size() != r.security_ids.size()) {
            throw Error(ErrorCode::ParseError, "theta_jk dimension does not match security_ids");
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

std::string report_csv_header() {
    return "theta_m,theta,theta_t,mean_return,psi_sq,chi_sq,phi,divergence,n,j";
}

std::string report_csv_row(const VarianceReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::string row;
    row += format_double(r.theta_m) + ',';
    row += format_double(r.theta) + ',';
    row += opt(r.theta_t) + ',';
    row += format_double(r.mean_return) + ',';
    row += format_double(r.moments.psi_sq) + ',';
    row += format_double(r.moments.chi_sq) + ',';
    row += format_double(r.moments.phi) + ',';
    row += opt(r.divergence) + ',';
    row += std::to_string(r.trade_count) + ',';
    row += std::to_string(r.security_ids.size());
    return row;
}

// ---------------------------------------------------------------------------
// Sweep

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
    const bool taylor = !cells.empty() && cells.front().theta_t_mean.has_value();
    out << "cv_u,rho,theta_m_mean,theta_mean,divergence_mean,divergence_stddev,replications";
    if (taylor) out << ",theta_t_mean";
    out << '\n';
    for (const auto& c : cells) {
        out << format_double(c.cv_u) << ',' << format_double(c.rho) << ','
            << format_double(c.theta_m_mean) << ',' << format_double(c.theta_mean) << ','
            << format_double(c.divergence_mean) << ',' << format_double(c.divergence_stddev) << ','
            << c.replications;
        if (taylor) out << ',' << format_double(c.theta_t_mean.value_or(std::nan("")));
        out << '\n';
    }
}

}  // namespace mbv::io
