#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ecx::csv {

using Record = std::vector<std::string>;

// RFC-4180 reader: quoted fields, doubled quotes, CRLF or LF line ends, a
// leading UTF-8 BOM is dropped. Blank lines are skipped. Throws
// Error(MalformedRow) on an unterminated quote.
std::vector<Record> parse(std::string_view text);

// Quotes the field only when it contains a separator, quote or line break.
std::string escape(std::string_view field);

std::string join(const Record& record);

}  // namespace ecx::csv
