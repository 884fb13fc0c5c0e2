#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace weakslit::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kDataError = 1,
    kUsageError = 2,
    kValidationFailure = 3,
};

/// One output table; every command writes exactly one.
struct Table {
    using Cell = std::variant<double, std::int64_t>;

    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Floats as %.17g (inf/-inf/nan spelled out); integers verbatim.
void write_csv(const Table& table, std::ostream& out);

/// {"columns": [...], "rows": [{column: value, ...}, ...]}; non-finite floats become null.
void write_json(const Table& table, std::ostream& out);

/// Default seed: $WEAKSLIT_SEED when set and numeric, else 42.
[[nodiscard]] std::uint64_t default_seed();

/// Parses and runs one command line (args excludes the program name).
/// Results go to --out when given, otherwise to `out`; diagnostics to `err`.
[[nodiscard]] int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace weakslit::cli
