#include "prunelab/harness/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "prunelab/errors.hpp"

namespace prunelab::harness {
namespace {

std::string opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::optional<double> read_opt(const std::string& cell, std::string_view what) {
    if (cell.empty()) return std::nullopt;
    return parse_real(cell, what);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols = {
        "schema_version", "cell_id", "strategy",   "xi",     "exponent",     "d",
        "n",              "phi",     "p",          "lambda", "rho",          "gamma",
        "beta",           "beta_tilde", "m",       "m_prime", "m_tilde",     "m0",
        "nu0",            "theory_error", "empirical_mean", "empirical_std", "trials",
        "seed",           "error_code"};
    return cols;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& r : rows) {
        out << r.schema_version << ',' << r.cell_id << ',' << r.strategy << ',' << opt(r.xi) << ','
            << opt(r.exponent) << ',' << r.d << ',' << r.n << ',' << format_real(r.phi) << ','
            << format_real(r.p) << ',' << format_real(r.lambda) << ',' << format_real(r.rho) << ','
            << opt(r.gamma) << ',' << opt(r.beta) << ',' << opt(r.beta_tilde) << ',' << opt(r.m)
            << ',' << opt(r.m_prime) << ',' << opt(r.m_tilde) << ',' << opt(r.m0) << ','
            << opt(r.nu0) << ',' << opt(r.theory_error) << ',' << opt(r.empirical_mean) << ','
            << opt(r.empirical_std) << ',' << (r.trials ? std::to_string(*r.trials) : "") << ','
            << r.seed << ',' << r.error_code << '\n';
    }
}

std::string sweep_csv_string(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    return os.str();
}

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

Table read_table(std::istream& in) {
    Table t;
    std::string line;
    if (!next_line(in, line)) throw InvalidArgument("csv: missing header line");
    t.header = split_fields(line);
    int line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != t.header.size())
            throw InvalidArgument("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

Table with_derived_columns(Table t) {
    const int cn = t.column("n");
    const int cp = t.column("p");
    if (cn < 0 || cp < 0) return t;
    const bool add_kept = t.column("kept") < 0;
    const bool add_ratio = t.column("ratio") < 0;
    if (add_kept) t.header.push_back("kept");
    if (add_ratio) t.header.push_back("ratio");
    for (auto& row : t.rows) {
        const std::string& ns = row[static_cast<std::size_t>(cn)];
        const std::string& ps = row[static_cast<std::size_t>(cp)];
        const bool ok = !ns.empty() && !ps.empty();
        const double n = ok ? parse_real(ns, "n") : 0.0;
        const double p = ok ? parse_real(ps, "p") : 0.0;
        if (add_kept) row.push_back(ok ? format_real(n * p) : "");
        if (add_ratio) row.push_back(ok && p > 0.0 ? format_real(1.0 / p) : "");
    }
    return t;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open csv file '" + path + "'");
    return read_table(in);
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    const Table t = read_table(in);
    const auto& cols = sweep_columns();
    std::string missing, unexpected;
    for (const auto& c : cols)
        if (t.column(c) < 0) missing += (missing.empty() ? "" : ", ") + c;
    for (const auto& h : t.header)
        if (std::find(cols.begin(), cols.end(), h) == cols.end())
            unexpected += (unexpected.empty() ? "" : ", ") + h;
    if (!missing.empty() || !unexpected.empty()) {
        std::string msg = "csv does not match the sweep schema";
        if (!missing.empty()) msg += "; missing columns: " + missing;
        if (!unexpected.empty()) msg += "; unexpected columns: " + unexpected;
        throw InvalidArgument(msg);
    }
    std::vector<SweepRow> rows;
    for (const auto& f : t.rows) {
        auto at = [&](const char* name) -> const std::string& {
            return f[static_cast<std::size_t>(t.column(name))];
        };
        SweepRow r;
        r.schema_version = static_cast<int>(parse_integer(at("schema_version"), "schema_version"));
        if (r.schema_version != kSchemaVersion)
            throw InvalidArgument("csv schema_version " + std::to_string(r.schema_version) +
                                  " not supported");
        r.cell_id = parse_integer(at("cell_id"), "cell_id");
        r.strategy = at("strategy");
        r.xi = read_opt(at("xi"), "xi");
        r.exponent = read_opt(at("exponent"), "exponent");
        r.d = static_cast<int>(parse_integer(at("d"), "d"));
        r.n = static_cast<int>(parse_integer(at("n"), "n"));
        r.phi = parse_real(at("phi"), "phi");
        r.p = parse_real(at("p"), "p");
        r.lambda = parse_real(at("lambda"), "lambda");
        r.rho = parse_real(at("rho"), "rho");
        r.gamma = read_opt(at("gamma"), "gamma");
        r.beta = read_opt(at("beta"), "beta");
        r.beta_tilde = read_opt(at("beta_tilde"), "beta_tilde");
        r.m = read_opt(at("m"), "m");
        r.m_prime = read_opt(at("m_prime"), "m_prime");
        r.m_tilde = read_opt(at("m_tilde"), "m_tilde");
        r.m0 = read_opt(at("m0"), "m0");
        r.nu0 = read_opt(at("nu0"), "nu0");
        r.theory_error = read_opt(at("theory_error"), "theory_error");
        r.empirical_mean = read_opt(at("empirical_mean"), "empirical_mean");
        r.empirical_std = read_opt(at("empirical_std"), "empirical_std");
        if (!at("trials").empty()) r.trials = static_cast<int>(parse_integer(at("trials"), "trials"));
        std::uint64_t seed = 0;
        const std::string& s = at("seed");
        const auto res = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw InvalidArgument("seed: not an unsigned integer: '" + s + "'");
        r.seed = seed;
        r.error_code = at("error_code");
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_dp_csv(std::ostream& out, const DPHistory& h) {
    out << "step,kind,pool_size,validation_accuracy,test_error_exact,patience_counter,"
           "patience_limit,augmentation\n";
    for (const auto& e : h.events) {
        out << e.step << ',' << event_kind_name(e.kind) << ',' << e.pool_size << ','
            << format_real(e.validation_accuracy) << ',' << format_real(e.test_error_exact) << ','
            << e.patience_counter << ','
            << (e.patience_limit == kInfinitePatience ? std::string("inf")
                                                      : std::to_string(e.patience_limit))
            << ',' << (e.augmentation ? 1 : 0) << '\n';
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace prunelab::harness
