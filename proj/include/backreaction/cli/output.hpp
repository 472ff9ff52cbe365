#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "backreaction/cli/config.hpp"

#include <json.hpp>

namespace backreaction::cli {

/// One table cell: numeric cells print as %.16e (17 significant digits, a
/// lossless round trip for doubles), text cells verbatim.
using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> comments;  ///< emitted as leading '# ' lines (CSV only)
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> footers;   ///< trailing '# ' lines (CSV only)
};

std::string format_double(double v);

/// Space-separated key=value echo of the fields relevant to a command.
std::string config_echo(const RunConfig& cfg, const std::string& command);

nlohmann::json config_json(const RunConfig& cfg, const std::string& command);

std::string timestamp_utc();

void write_csv(std::ostream& os, const Table& table);

/// Writes either format to cfg.out ('-' = stdout). For JSON the table rows
/// are emitted as an array of objects under "rows" alongside `extra` fields.
void write_output(const RunConfig& cfg, const std::string& command, const Table& table,
                  const nlohmann::json& extra);

}  // namespace backreaction::cli
