#include "dynreserve/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace dynreserve {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    std::size_t column(std::string_view name, const fs::path& path) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw std::invalid_argument(path.string() + ": missing column '" + std::string(name) + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    }
};

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (!have_header) {
            for (auto f : fields) table.header.emplace_back(f);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": expected " +
                                        std::to_string(table.header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        table.rows.emplace_back(fields.begin(), fields.end());
        table.line_numbers.push_back(line_no);
    }
    if (!have_header) throw std::invalid_argument(path.string() + ": empty file");
    return table;
}

std::string where(const fs::path& path, std::size_t line) { return path.string() + ":" + std::to_string(line) + ": "; }

double field_number(const CsvTable& t, std::size_t row, std::size_t col, const fs::path& path) {
    try {
        return parse_number(t.rows[row][col]);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where(path, t.line_numbers[row]) + "column '" + t.header[col] + "': " + e.what());
    }
}

Timestamp field_timestamp(const CsvTable& t, std::size_t row, std::size_t col, const fs::path& path) {
    try {
        return parse_timestamp(t.rows[row][col]);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(where(path, t.line_numbers[row]) + e.what());
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

// Parses "p5" / "p2.5" to 0.05 / 0.025; nullopt for anything else.
std::optional<double> parse_level_column(std::string_view name) {
    if (name.size() < 2 || name.front() != 'p') return std::nullopt;
    try {
        const double pct = parse_number(name.substr(1));
        if (!(pct > 0.0 && pct < 100.0)) return std::nullopt;
        return pct / 100.0;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::vector<Timestamp> timestamps_of(const CsvTable& t, std::size_t col, const fs::path& path) {
    std::vector<Timestamp> ts(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        ts[r] = field_timestamp(t, r, col, path);
        if (r > 0 && ts[r] <= ts[r - 1]) {
            throw std::invalid_argument(where(path, t.line_numbers[r]) +
                                        (ts[r] == ts[r - 1] ? "duplicate timestamp " : "non-monotone timestamp ") +
                                        format_timestamp(ts[r]));
        }
    }
    return ts;
}

TimeGrid grid_of(const std::vector<Timestamp>& ts, const fs::path& path) {
    try {
        return grid_from_timestamps(ts);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

}  // namespace

std::string format_number(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite number: '" + std::string(text) + "'");
    return v;
}

std::string level_column(double p) {
    const double pct = std::round(p * 1e8) / 1e6;
    return (pct < 10.0 ? "p0" : "p") + format_number(pct);
}

HistoricalSeries load_history(const fs::path& path, VariableKind kind) {
    const auto t = read_csv(path);
    const auto c_ts = t.column("timestamp", path);
    const auto c_fc = t.column("forecast_mw", path);
    const auto c_ac = t.column("actual_mw", path);
    if (t.rows.empty()) throw std::invalid_argument(path.string() + ": no records");
    const auto ts = timestamps_of(t, c_ts, path);
    std::vector<HistoricalRecord> records(t.rows.size());
    auto gap = std::chrono::minutes{60};
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        records[r] = {ts[r], field_number(t, r, c_fc, path), field_number(t, r, c_ac, path)};
        if (r == 1 || (r > 1 && ts[r] - ts[r - 1] < gap)) {
            gap = std::chrono::duration_cast<std::chrono::minutes>(ts[r] - ts[r - 1]);
        }
    }
    return HistoricalSeries(kind, std::move(records), gap);
}

void write_history(const fs::path& path, const HistoricalSeries& history) {
    auto out = open_out(path);
    out << "timestamp,forecast_mw,actual_mw\n";
    for (const auto& rec : history.records()) {
        out << format_timestamp(rec.timestamp) << ',' << format_number(rec.forecast) << ','
            << format_number(rec.actual) << '\n';
    }
    close_out(out, path);
}

ProbabilisticForecast load_forecast(const fs::path& path, VariableKind kind,
                                    const std::optional<std::vector<double>>& levels) {
    const auto t = read_csv(path);
    const auto c_ts = t.column("timestamp", path);
    const auto c_cf = t.column("central", path);
    std::vector<std::pair<double, std::size_t>> level_cols;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        if (c == c_ts || c == c_cf) continue;
        const auto p = parse_level_column(t.header[c]);
        if (!p) throw std::invalid_argument(path.string() + ": unexpected column '" + t.header[c] + "'");
        level_cols.emplace_back(*p, c);
    }
    std::sort(level_cols.begin(), level_cols.end());
    for (std::size_t i = 1; i < level_cols.size(); ++i) {
        if (level_cols[i].first == level_cols[i - 1].first) {
            throw std::invalid_argument(path.string() + ": duplicate level column '" +
                                        t.header[level_cols[i].second] + "'");
        }
    }
    if (levels) {
        bool match = levels->size() == level_cols.size();
        for (std::size_t i = 0; match && i < levels->size(); ++i) {
            match = std::abs((*levels)[i] - level_cols[i].first) < 1e-9;
        }
        if (!match) throw std::invalid_argument(path.string() + ": quantile columns do not match configured levels");
    }
    if (t.rows.empty()) throw std::invalid_argument(path.string() + ": no rows");

    const auto ts = timestamps_of(t, c_ts, path);
    const auto grid = grid_of(ts, path);
    std::vector<double> central(t.rows.size());
    std::vector<IntervalCdf> intervals;
    intervals.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        central[r] = field_number(t, r, c_cf, path);
        if (level_cols.empty()) {
            intervals.push_back(IntervalCdf::atom(central[r]));
            continue;
        }
        std::vector<Threshold> th;
        th.reserve(level_cols.size());
        for (std::size_t i = 0; i < level_cols.size(); ++i) {
            const double v = field_number(t, r, level_cols[i].second, path);
            if (i > 0 && v < th.back().v) {
                throw std::invalid_argument(where(path, t.line_numbers[r]) + "quantile crossing: " +
                                            t.header[level_cols[i].second] + " < " +
                                            t.header[level_cols[i - 1].second]);
            }
            th.push_back({level_cols[i].first, v});
        }
        intervals.emplace_back(std::move(th));
    }
    try {
        return ProbabilisticForecast(TimeSeries(kind, grid.start, grid.resolution, std::move(central)),
                                     std::move(intervals));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

namespace {

std::vector<double> level_union(const ProbabilisticForecast& f) {
    std::set<double> levels;
    for (const auto& cdf : f.intervals()) {
        if (cdf.is_degenerate() && cdf.thresholds().size() == 1) continue;
        for (const auto& th : cdf.thresholds()) levels.insert(th.p);
    }
    return {levels.begin(), levels.end()};
}

}  // namespace

void write_forecast(const fs::path& path, const ProbabilisticForecast& forecast) {
    const auto levels = level_union(forecast);
    auto out = open_out(path);
    out << "timestamp,central";
    for (double p : levels) out << ',' << level_column(p);
    out << '\n';
    for (std::size_t t = 0; t < forecast.horizon(); ++t) {
        out << format_timestamp(forecast.grid().at(t)) << ',' << format_number(forecast.central()[t]);
        for (double p : levels) out << ',' << format_number(forecast.interval(t).inverse(p));
        out << '\n';
    }
    close_out(out, path);
}

void write_scenarios(const fs::path& path, const ScenarioSet& set) {
    auto out = open_out(path);
    out << "scenario_id,probability";
    for (std::size_t t = 0; t < set.horizon(); ++t) out << ",t" << t;
    out << '\n';
    for (std::size_t s = 0; s < set.size(); ++s) {
        out << s << ',' << format_number(set.scenarios[s].probability);
        for (double v : set.scenarios[s].values) out << ',' << format_number(v);
        out << '\n';
    }
    close_out(out, path);

    nlohmann::ordered_json meta;
    meta["kind"] = std::string(to_string(set.kind));
    meta["start"] = format_timestamp(set.grid.start);
    meta["resolution_minutes"] = set.grid.resolution.count();
    meta["horizon"] = set.horizon();
    meta["source_id"] = set.source_id;
    meta["seed"] = set.seed;
    meta["theta"] = set.params.theta;
    meta["omega"] = set.params.omega;
    meta["jitter"] = set.params.jitter;
    meta["repair"] = set.params.repair == CovarianceRepair::preserve_lag1 ? "preserve_lag1" : "eigen_clip";
    std::vector<double> log_weights;
    for (const auto& s : set.scenarios) log_weights.push_back(s.log_weight);
    meta["log_weights"] = log_weights;
    auto meta_path = path;
    meta_path.replace_extension(".meta.json");
    auto mout = open_out(meta_path);
    mout << meta.dump(2) << '\n';
    close_out(mout, meta_path);
}

ScenarioSet load_scenarios(const fs::path& path) {
    auto meta_path = path;
    meta_path.replace_extension(".meta.json");
    std::ifstream min(meta_path);
    if (!min) throw std::invalid_argument("cannot open " + meta_path.string());
    nlohmann::json meta;
    try {
        min >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(meta_path.string() + ": " + e.what());
    }

    ScenarioSet set;
    try {
        set.kind = parse_variable_kind(meta.at("kind").get<std::string>());
        set.grid.start = parse_timestamp(meta.at("start").get<std::string>());
        set.grid.resolution = std::chrono::minutes{meta.at("resolution_minutes").get<long>()};
        set.grid.size = meta.at("horizon").get<std::size_t>();
        set.source_id = meta.at("source_id").get<std::string>();
        set.seed = meta.at("seed").get<std::uint64_t>();
        set.params.theta = meta.at("theta").get<double>();
        set.params.omega = meta.at("omega").get<double>();
        set.params.jitter = meta.at("jitter").get<double>();
        set.params.repair = meta.at("repair").get<std::string>() == "eigen_clip" ? CovarianceRepair::eigen_clip
                                                                                 : CovarianceRepair::preserve_lag1;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(meta_path.string() + ": " + e.what());
    }
    const auto log_weights = meta.value("log_weights", std::vector<double>{});

    const auto t = read_csv(path);
    const auto c_id = t.column("scenario_id", path);
    const auto c_pr = t.column("probability", path);
    if (t.header.size() != set.horizon() + 2) {
        throw std::invalid_argument(path.string() + ": column count does not match horizon " +
                                    std::to_string(set.horizon()));
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        Scenario sc;
        if (field_number(t, r, c_id, path) != static_cast<double>(r)) {
            throw std::invalid_argument(where(path, t.line_numbers[r]) + "scenario ids must be 0,1,2,...");
        }
        sc.probability = field_number(t, r, c_pr, path);
        for (std::size_t k = 0; k < set.horizon(); ++k) {
            sc.values.push_back(field_number(t, r, t.column("t" + std::to_string(k), path), path));
        }
        sc.log_weight = r < log_weights.size() ? log_weights[r] : 0.0;
        set.scenarios.push_back(std::move(sc));
    }
    return set;
}

void write_reserves(const fs::path& path, const ReserveProfile& profile) {
    auto out = open_out(path);
    out << "timestamp,r_up_mw,r_dn_mw,method\n";
    for (std::size_t t = 0; t < profile.size(); ++t) {
        out << format_timestamp(profile.grid.at(t)) << ',' << format_number(profile.up[t]) << ','
            << format_number(profile.down[t]) << ',' << profile.method << '\n';
    }
    close_out(out, path);
}

ReserveProfile load_reserves(const fs::path& path) {
    const auto t = read_csv(path);
    const auto c_ts = t.column("timestamp", path);
    const auto c_up = t.column("r_up_mw", path);
    const auto c_dn = t.column("r_dn_mw", path);
    const auto c_m = t.column("method", path);
    if (t.rows.empty()) throw std::invalid_argument(path.string() + ": no rows");
    ReserveProfile p;
    p.grid = grid_of(timestamps_of(t, c_ts, path), path);
    p.method = t.rows.front()[c_m];
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double up = field_number(t, r, c_up, path);
        const double dn = field_number(t, r, c_dn, path);
        if (up < 0.0 || dn < 0.0) throw std::invalid_argument(where(path, t.line_numbers[r]) + "negative reserve");
        p.up.push_back(up);
        p.down.push_back(dn);
    }
    return p;
}

void write_risk(const fs::path& path, const RiskProfile& profile) {
    auto out = open_out(path);
    out << "timestamp,rho_short,rho_long\n";
    for (std::size_t t = 0; t < profile.short_risk.size(); ++t) {
        out << format_timestamp(profile.grid.at(t)) << ',' << format_number(profile.short_risk[t]) << ','
            << format_number(profile.long_risk[t]) << '\n';
    }
    close_out(out, path);
}

RiskProfile load_risk(const fs::path& path) {
    const auto t = read_csv(path);
    const auto c_ts = t.column("timestamp", path);
    const auto c_s = t.column("rho_short", path);
    const auto c_l = t.column("rho_long", path);
    if (t.rows.empty()) throw std::invalid_argument(path.string() + ": no rows");
    RiskProfile p;
    p.grid = grid_of(timestamps_of(t, c_ts, path), path);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        p.short_risk.push_back(field_number(t, r, c_s, path));
        p.long_risk.push_back(field_number(t, r, c_l, path));
    }
    return p;
}

namespace {

std::size_t resample_factor(std::chrono::minutes from, std::chrono::minutes to, std::size_t n) {
    if (to < from || to.count() % from.count() != 0) {
        throw std::invalid_argument("cannot resample " + std::to_string(from.count()) + "-minute data to " +
                                    std::to_string(to.count()) + " minutes");
    }
    const auto k = static_cast<std::size_t>(to.count() / from.count());
    if (n % k != 0) {
        throw std::invalid_argument("horizon of " + std::to_string(n) + " intervals does not divide into " +
                                    std::to_string(to.count()) + "-minute intervals");
    }
    return k;
}

}  // namespace

ProbabilisticForecast resample_forecast(const ProbabilisticForecast& f, std::chrono::minutes target) {
    const std::size_t k = resample_factor(f.grid().resolution, target, f.horizon());
    if (k == 1) return f;
    const auto levels = level_union(f);
    const std::size_t n = f.horizon() / k;
    std::vector<double> central(n, 0.0);
    std::vector<IntervalCdf> intervals;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Threshold> th;
        for (double p : levels) th.push_back({p, 0.0});
        for (std::size_t j = i * k; j < (i + 1) * k; ++j) {
            central[i] += f.central()[j];
            for (auto& x : th) x.v += f.interval(j).inverse(x.p);
        }
        central[i] /= static_cast<double>(k);
        for (auto& x : th) x.v /= static_cast<double>(k);
        intervals.push_back(th.empty() ? IntervalCdf::atom(central[i]) : IntervalCdf(std::move(th)));
    }
    return ProbabilisticForecast(TimeSeries(f.kind(), f.grid().start, target, std::move(central)),
                                 std::move(intervals));
}

HistoricalSeries resample_history(const HistoricalSeries& h, std::chrono::minutes target) {
    if (target < h.resolution() || target.count() % h.resolution().count() != 0) {
        throw std::invalid_argument("cannot resample history to " + std::to_string(target.count()) + " minutes");
    }
    if (target == h.resolution()) return h;
    // Bucket by the target interval containing each record.
    std::map<Timestamp, std::pair<HistoricalRecord, std::size_t>> buckets;
    const auto width = std::chrono::duration_cast<std::chrono::seconds>(target);
    for (const auto& rec : h.records()) {
        const auto since = rec.timestamp.time_since_epoch();
        const Timestamp key{since - since % width};
        auto& [acc, count] = buckets[key];
        acc.timestamp = key;
        acc.forecast += rec.forecast;
        acc.actual += rec.actual;
        ++count;
    }
    std::vector<HistoricalRecord> out;
    for (auto& [key, entry] : buckets) {
        auto rec = entry.first;
        rec.forecast /= static_cast<double>(entry.second);
        rec.actual /= static_cast<double>(entry.second);
        out.push_back(rec);
    }
    return HistoricalSeries(h.kind(), std::move(out), target);
}

}  // namespace dynreserve
