#include "backreaction/cli/output.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace backreaction::cli {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace {

std::string vec_echo(const Vec3& v) {
    std::ostringstream os;
    os << v.x << ' ' << v.y << ' ' << v.z;
    return os.str();
}

std::string cell_text(const Cell& c) {
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
    return std::get<std::string>(c);
}

nlohmann::json cell_json(const Cell& c) {
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<long long>(c)) return std::get<long long>(c);
    return std::get<std::string>(c);
}

}  // namespace

std::string config_echo(const RunConfig& cfg, const std::string& command) {
    std::ostringstream os;
    os << "command=" << command << " system=" << cfg.system << " eta=" << cfg.eta;
    if (cfg.system == "elastic") os << " omega=" << cfg.omega;
    else os << " e=[" << vec_echo(cfg.e_vec) << "] b=[" << vec_echo(cfg.b_vec) << "]";
    os << " method=" << cfg.method << " tol=" << cfg.tol << " seed=" << cfg.seed;
    return os.str();
}

nlohmann::json config_json(const RunConfig& cfg, const std::string& command) {
    nlohmann::json j{{"command", command},
                     {"system", cfg.system},
                     {"eta", cfg.eta},
                     {"method", cfg.method},
                     {"tol", cfg.tol},
                     {"seed", cfg.seed}};
    if (cfg.system == "elastic") {
        j["omega"] = cfg.omega;
    } else {
        j["e"] = {cfg.e_vec.x, cfg.e_vec.y, cfg.e_vec.z};
        j["b"] = {cfg.b_vec.x, cfg.b_vec.y, cfg.b_vec.z};
    }
    return j;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_csv(std::ostream& os, const Table& table) {
    for (const auto& c : table.comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << cell_text(row[i]) << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
    for (const auto& f : table.footers) os << "# " << f << "\n";
}

void write_output(const RunConfig& cfg, const std::string& command, const Table& table,
                  const nlohmann::json& extra) {
    std::ostringstream body;
    if (cfg.format == "csv") {
        Table t = table;
        std::vector<std::string> head;
        head.push_back("backreaction " + command);
        head.push_back("config: " + config_echo(cfg, command));
        if (!cfg.no_timestamp) head.push_back("timestamp: " + timestamp_utc());
        t.comments.insert(t.comments.begin(), head.begin(), head.end());
        write_csv(body, t);
    } else if (cfg.format == "json") {
        nlohmann::json j;
        j["command"] = command;
        j["config"] = config_json(cfg, command);
        if (!cfg.no_timestamp) j["timestamp"] = timestamp_utc();
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
        if (!table.columns.empty()) {
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& row : table.rows) {
                nlohmann::json obj;
                for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i)
                    obj[table.columns[i]] = cell_json(row[i]);
                rows.push_back(std::move(obj));
            }
            j["columns"] = table.columns;
            j["rows"] = std::move(rows);
        }
        body << j.dump(2) << "\n";
    } else {
        throw std::invalid_argument("unknown format: " + cfg.format);
    }

    if (cfg.out == "-") {
        std::cout << body.str();
    } else {
        std::ofstream f(cfg.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + cfg.out);
        f << body.str();
    }
}

}  // namespace backreaction::cli
