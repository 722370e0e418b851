#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wannflow::csv {

using Row = std::vector<std::string>;

/// Parse RFC 4180 CSV from a stream: quoted fields, embedded commas/quotes/
/// newlines, both \n and \r\n line endings.  A trailing newline does not
/// produce an empty record.
std::vector<Row> read(std::istream& in);

/// Read a whole CSV file.  Throws DataError if the file cannot be opened.
std::vector<Row> read_file(const std::string& path);

/// Quote a field if it contains a comma, quote, or newline.
std::string escape(const std::string& field);

/// Write rows with \n line endings, quoting only where needed.
void write(std::ostream& out, const std::vector<Row>& rows);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Strict double parse of a full field.  Throws DataError on failure.
double parse_double(const std::string& field, const std::string& context);

/// Strict non-negative integer parse of a full field.  Throws DataError on failure.
long long parse_int(const std::string& field, const std::string& context);

}  // namespace wannflow::csv
